#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ppcover/blahut_arimoto.hpp"
#include "ppcover/discretize.hpp"
#include "ppcover/feedforward.hpp"
#include "ppcover/frontier.hpp"
#include "ppcover/sdpi.hpp"

namespace ppcover {

// 12 significant digits for CSV, full round-trip precision for JSON
inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string fmt17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_frontier_csv(const Frontier& f, std::ostream& os) {
    if (f.points.empty()) return;
    const bool two_rate = f.points.front().point.rates.size() == 2;
    if (!two_rate) {
        os << "w1,R1,D,alpha1,alpha2,alpha3,alpha4,beta1,beta2,beta3,beta4\n";
        for (const auto& p : f.points) {
            os << fmt12(p.weights[0]) << ',' << fmt12(p.point.rates[0]) << ','
               << fmt12(p.point.distortion);
            for (int k = 0; k < 4; ++k) os << ',' << fmt12(p.point.alphas[0][k]);
            for (int k = 0; k < 4; ++k) os << ',' << fmt12(p.point.betas[0][k]);
            os << '\n';
        }
    } else {
        os << "w1,w2,R1,R2,D";
        for (int i = 1; i <= 2; ++i)
            for (const char* nm : {"alpha", "beta"})
                for (int k = 1; k <= 4; ++k) os << ',' << nm << i << '_' << k;
        os << '\n';
        for (const auto& p : f.points) {
            os << fmt12(p.weights[0]) << ',' << fmt12(p.weights[1]) << ','
               << fmt12(p.point.rates[0]) << ',' << fmt12(p.point.rates[1]) << ','
               << fmt12(p.point.distortion);
            for (int i = 0; i < 2; ++i) {
                for (int k = 0; k < 4; ++k) os << ',' << fmt12(p.point.alphas[i][k]);
                for (int k = 0; k < 4; ++k) os << ',' << fmt12(p.point.betas[i][k]);
            }
            os << '\n';
        }
    }
}

// full-precision parameters and optimizer diagnostics
inline nlohmann::json frontier_sidecar(const Frontier& f) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : f.points) {
        nlohmann::json jp;
        jp["weights"] = p.weights;
        jp["rates"] = p.point.rates;
        jp["distortion"] = p.point.distortion;
        nlohmann::json alphas = nlohmann::json::array(), betas = nlohmann::json::array();
        for (const auto& a : p.point.alphas) alphas.push_back(a.w);
        for (const auto& b : p.point.betas) betas.push_back(b.w);
        jp["alpha"] = alphas;
        jp["beta"] = betas;
        jp["objective"] = p.objective;
        jp["stationarity_gap"] = p.stationarity_gap;
        jp["iterations"] = p.iterations;
        points.push_back(jp);
    }
    nlohmann::json out;
    out["points"] = points;
    return out;
}

inline void write_ba_csv(const std::vector<BAFrontierRow>& rows, std::ostream& os) {
    os << "slope,I_per_symbol,R_per_time,D,converged\n";
    for (const auto& r : rows)
        os << fmt12(r.slope) << ',' << fmt12(r.I_per_symbol) << ',' << fmt12(r.R_per_time) << ','
           << fmt12(r.D) << ',' << (r.converged ? 1 : 0) << '\n';
}

inline void write_deltascale_csv(const std::vector<DeltaScaleRow>& rows, std::ostream& os) {
    os << "delta,I_over_delta,R_target,E_dbar,D_target,overflow_term\n";
    for (const auto& r : rows)
        os << fmt12(r.delta) << ',' << fmt12(r.I_over_delta) << ',' << fmt12(r.R_target) << ','
           << fmt12(r.E_dbar) << ',' << fmt12(r.D_target) << ',' << fmt12(r.overflow_term) << '\n';
}

inline void write_deltascale_ceo_csv(const std::vector<CeoDeltaRow>& rows, std::ostream& os) {
    os << "delta,I1_over_delta,R1_target,I2_over_delta,R2_target,E_dbar,D_target,E_yhat,"
          "overflow_term\n";
    for (const auto& r : rows)
        os << fmt12(r.delta) << ',' << fmt12(r.I_over_delta[0]) << ',' << fmt12(r.R_target[0]) << ','
           << fmt12(r.I_over_delta[1]) << ',' << fmt12(r.R_target[1]) << ',' << fmt12(r.E_dbar)
           << ',' << fmt12(r.D_target) << ',' << fmt12(r.E_yhat) << ',' << fmt12(r.overflow_term)
           << '\n';
}

inline void write_sdpi_csv(const std::vector<SdpiBatchRow>& rows, std::ostream& os) {
    os << "model_id,p_or_mu,delta,lhs,rhs,slack\n";
    for (const auto& r : rows)
        os << r.model_id << ',' << fmt12(r.p_or_mu) << ',' << fmt12(r.delta) << ','
           << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ',' << fmt17(r.slack) << '\n';
}

inline nlohmann::json report_json(const FFReport& r) {
    nlohmann::json j;
    j["lambda"] = r.lambda;
    j["T"] = r.horizon;
    j["R"] = r.rate;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["mean_d"] = r.mean_d;
    j["se_d"] = r.se_d;
    j["H_M"] = r.H_M;
    j["mi_mc"] = r.mi_mc;
    j["se_mi"] = r.se_mi;
    j["lower_bound"] = r.lower_bound;
    j["upper_bound"] = r.upper_bound;
    return j;
}

}  // namespace ppcover
