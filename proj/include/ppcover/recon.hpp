#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ppcover/numeric.hpp"

namespace ppcover {

// Constraint set A for the reconstruction values: all of R+, a closed
// interval, or a finite set.  Needs at least one positive element.
class ReconSet {
public:
    enum class Kind { AllNonNegative, Interval, Finite };

    static ReconSet all_non_negative() { return ReconSet(Kind::AllNonNegative, 0, 0, {}); }

    static ReconSet interval(double lo, double hi) {
        if (!(0 <= lo && lo <= hi) || !(hi > 0))
            throw std::invalid_argument("ReconSet::interval: need 0 <= lo <= hi with hi > 0");
        return ReconSet(Kind::Interval, lo, hi, {});
    }

    static ReconSet finite(std::vector<double> values) {
        if (values.empty()) throw std::invalid_argument("ReconSet::finite: empty set");
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        bool positive = false;
        for (double v : values) {
            if (v < 0) throw std::invalid_argument("ReconSet::finite: negative element");
            if (v > 0) positive = true;
        }
        if (!positive) throw std::invalid_argument("ReconSet::finite: needs a positive element");
        return ReconSet(Kind::Finite, 0, 0, std::move(values));
    }

    // "all" | "interval:lo,hi" | "finite:v1,v2,..."
    static ReconSet parse(const std::string& text) {
        if (text == "all") return all_non_negative();
        auto colon = text.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("ReconSet::parse: expected all | interval:lo,hi | finite:v1,...");
        std::string kind = text.substr(0, colon);
        std::vector<double> vals;
        std::stringstream ss(text.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument("ReconSet::parse: bad number '" + tok + "'");
            vals.push_back(v);
        }
        if (kind == "interval") {
            if (vals.size() != 2) throw std::invalid_argument("ReconSet::parse: interval needs lo,hi");
            return interval(vals[0], vals[1]);
        }
        if (kind == "finite") return finite(std::move(vals));
        throw std::invalid_argument("ReconSet::parse: unknown kind '" + kind + "'");
    }

    std::string to_string() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::AllNonNegative: return "all";
            case Kind::Interval:
                os << "interval:" << lo_ << "," << hi_;
                return os.str();
            case Kind::Finite:
                os << "finite:";
                for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
                return os.str();
        }
        return "";
    }

    Kind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& values() const { return values_; }

private:
    ReconSet(Kind k, double lo, double hi, std::vector<double> values)
        : kind_(k), lo_(lo), hi_(hi), values_(std::move(values)) {}
    Kind kind_;
    double lo_, hi_;
    std::vector<double> values_;
};

struct PsiResult {
    double value;
    double minimizer;
};

// Psi_A(u) = inf_{v in A} v - u log v, together with its (an) achieving v.
// Cost of declaring intensity level u when the reconstruction is confined
// to A.  Concave piecewise smooth in u.
inline PsiResult psi(const ReconSet& A, double u) {
    if (u < 0) throw std::domain_error("psi: u must be >= 0");
    auto cost = [u](double v) -> double {
        if (v == 0) return u == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        return v - u * std::log(v);
    };
    switch (A.kind()) {
        case ReconSet::Kind::AllNonNegative:
            // interior optimum v = u; at u = 0 the infimum is at v -> 0
            return {u - phi(u), u};
        case ReconSet::Kind::Interval: {
            double v = std::clamp(u, A.lo(), A.hi());
            if (u == 0 && A.lo() == 0) return {0.0, 0.0};
            if (v == 0) v = A.hi();  // u > 0 never picks v = 0
            return {cost(v), v};
        }
        case ReconSet::Kind::Finite: {
            double best = std::numeric_limits<double>::infinity(), arg = A.values().front();
            for (double v : A.values()) {
                double c = cost(v);
                if (c < best) {
                    best = c;
                    arg = v;
                }
            }
            return {best, arg};
        }
    }
    throw std::logic_error("psi: unreachable");
}

inline double psi_value(const ReconSet& A, double u) { return psi(A, u).value; }

}  // namespace ppcover
