#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppcover {

// Tagged extended real.  Distortions can be exactly +inf (reconstruction 0 at
// an arrival) and log-likelihood ratios exactly -inf; these are carried as
// tags, never as floating sentinels, and any +inf absorbed into a sum keeps
// the sum +inf.
class ExtReal {
public:
    ExtReal() : value_(0), tag_(Tag::Finite) {}

    static ExtReal finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite on non-finite value");
        ExtReal e;
        e.value_ = v;
        return e;
    }
    static ExtReal pos_inf() {
        ExtReal e;
        e.tag_ = Tag::PosInf;
        return e;
    }
    static ExtReal neg_inf() {
        ExtReal e;
        e.tag_ = Tag::NegInf;
        return e;
    }

    bool is_finite() const { return tag_ == Tag::Finite; }
    bool is_pos_inf() const { return tag_ == Tag::PosInf; }
    bool is_neg_inf() const { return tag_ == Tag::NegInf; }

    double value() const {
        if (!is_finite()) throw std::logic_error("ExtReal::value on infinite value");
        return value_;
    }

    // value, with infinities mapped to IEEE infinities (for printing)
    double as_double() const {
        if (is_pos_inf()) return std::numeric_limits<double>::infinity();
        if (is_neg_inf()) return -std::numeric_limits<double>::infinity();
        return value_;
    }

    ExtReal operator+(const ExtReal& o) const {
        if (is_pos_inf() || o.is_pos_inf()) {
            if (is_neg_inf() || o.is_neg_inf())
                throw std::logic_error("ExtReal: +inf + -inf");
            return pos_inf();
        }
        if (is_neg_inf() || o.is_neg_inf()) return neg_inf();
        return finite(value_ + o.value_);
    }
    ExtReal& operator+=(const ExtReal& o) { return *this = *this + o; }

    ExtReal operator-() const {
        if (is_pos_inf()) return neg_inf();
        if (is_neg_inf()) return pos_inf();
        return finite(-value_);
    }
    ExtReal operator-(const ExtReal& o) const { return *this + (-o); }

    ExtReal operator/(double d) const {
        if (!(d > 0)) throw std::invalid_argument("ExtReal: divide by non-positive");
        return is_finite() ? finite(value_ / d) : *this;
    }

    bool operator==(const ExtReal& o) const {
        return tag_ == o.tag_ && (tag_ != Tag::Finite || value_ == o.value_);
    }

private:
    enum class Tag { Finite, PosInf, NegInf };
    double value_;
    Tag tag_ = Tag::Finite;
};

}  // namespace ppcover
