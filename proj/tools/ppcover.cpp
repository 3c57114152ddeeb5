// Command-line front end for the point-process functional-covering library.
// All stochastic commands take a mandatory 64-bit seed (flag or PPCOVER_SEED)
// and rerunning with identical flags produces byte-identical output files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ppcover/blahut_arimoto.hpp"
#include "ppcover/discretize.hpp"
#include "ppcover/feedforward.hpp"
#include "ppcover/frontier.hpp"
#include "ppcover/io.hpp"
#include "ppcover/sdpi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitComputation = 3;

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::array<double, 2> parse_pair(const std::string& s, const char* what) {
    auto v = parse_list(s);
    if (v.size() != 2) throw CLI::ValidationError(std::string(what) + ": expected two comma-separated values");
    return {v[0], v[1]};
}

ppcover::AtomVec parse_atoms(const std::string& s, const char* what) {
    auto v = parse_list(s);
    if (v.size() != 4) throw CLI::ValidationError(std::string(what) + ": expected four comma-separated values");
    return ppcover::AtomVec(v[0], v[1], v[2], v[3]);
}

std::uint64_t resolve_seed(const std::string& seed_str) {
    std::string s = seed_str;
    if (s.empty()) {
        if (const char* env = std::getenv("PPCOVER_SEED")) s = env;
    }
    if (s.empty())
        throw CLI::ValidationError("--seed is required (or set PPCOVER_SEED)");
    return std::strtoull(s.c_str(), nullptr, 10);
}

// "-" means stdout (and suppresses JSON sidecars)
class OutFile {
public:
    explicit OutFile(const std::string& path) : path_(path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
    bool is_stdout() const { return path_ == "-"; }
    std::string sidecar_path() const { return path_ + ".json"; }

private:
    std::string path_;
    std::ofstream file_;
};

void write_sidecar(const OutFile& out, const nlohmann::json& j) {
    if (out.is_stdout()) return;
    std::ofstream f(out.sidecar_path(), std::ios::binary);
    f << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate-distortion regions for point processes under functional-covering distortion"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker cap for internal parallelism")->capture_default_str();

    // ---- frontier ----
    auto* cmd_frontier = app.add_subcommand("frontier", "constrained functional-covering frontier");
    double fr_lambda = 1;
    std::string fr_set = "all", fr_out = "frontier.csv";
    int fr_weights = 64;
    double fr_wmin = 1e-3, fr_wmax = 1e3, fr_refine = 0;
    cmd_frontier->add_option("--lambda", fr_lambda, "source rate")->required();
    cmd_frontier->add_option("--set", fr_set, "reconstruction set: all | interval:lo,hi | finite:v1,v2,...")
        ->capture_default_str();
    cmd_frontier->add_option("--weights", fr_weights, "number of scalarization weights")->capture_default_str();
    cmd_frontier->add_option("--wmin", fr_wmin)->capture_default_str();
    cmd_frontier->add_option("--wmax", fr_wmax)->capture_default_str();
    cmd_frontier->add_option("--refine", fr_refine, "hull-gap refinement tolerance (0 = off)")
        ->capture_default_str();
    cmd_frontier->add_option("--out", fr_out, "output CSV ('-' for stdout)")->capture_default_str();

    // ---- ceo ----
    auto* cmd_ceo = app.add_subcommand("ceo", "two-encoder CEO frontier");
    double ceo_lambda = 1;
    std::string ceo_p = "0,0", ceo_mu = "0,0", ceo_out = "ceo.csv";
    int ceo_weights = 12;
    cmd_ceo->add_option("--lambda", ceo_lambda)->required();
    cmd_ceo->add_option("--p", ceo_p, "thinning probabilities p1,p2")->capture_default_str();
    cmd_ceo->add_option("--mu", ceo_mu, "noise rates mu1,mu2")->capture_default_str();
    cmd_ceo->add_option("--weights", ceo_weights, "weights per rate axis")->capture_default_str();
    cmd_ceo->add_option("--out", ceo_out)->capture_default_str();

    // ---- remote ----
    auto* cmd_remote = app.add_subcommand("remote", "remote Poisson source frontier");
    double rem_lambda = 1, rem_p = 0, rem_mu = 0;
    std::string rem_out = "remote.csv";
    int rem_weights = 64;
    cmd_remote->add_option("--lambda", rem_lambda)->required();
    cmd_remote->add_option("--p", rem_p, "erasure (thinning) probability")->capture_default_str();
    cmd_remote->add_option("--mu", rem_mu, "noise rate")->capture_default_str();
    cmd_remote->add_option("--weights", rem_weights)->capture_default_str();
    cmd_remote->add_option("--out", rem_out)->capture_default_str();

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo of the feedforward scheme");
    double sim_lambda = 1, sim_T = 50, sim_R = 0;
    long long sim_trials = 100000;
    std::string sim_seed, sim_out = "-";
    cmd_sim->add_option("--lambda", sim_lambda)->required();
    cmd_sim->add_option("--T", sim_T, "horizon")->required();
    cmd_sim->add_option("--R", sim_R, "code rate (nats per unit time)")->required();
    cmd_sim->add_option("--trials", sim_trials)->capture_default_str();
    cmd_sim->add_option("--seed", sim_seed, "master seed (PPCOVER_SEED fallback)");
    cmd_sim->add_option("--out", sim_out, "output JSON ('-' for stdout)")->capture_default_str();

    // ---- ba ----
    auto* cmd_ba = app.add_subcommand("ba", "Blahut-Arimoto oracle on the discretized source");
    double ba_lambda = 1, ba_delta = 1e-3, ba_dlo = 0.05, ba_dhi = 0.97;
    std::string ba_set = "finite:0,1", ba_out = "ba.csv";
    int ba_slopes = 48, ba_resolution = 256;
    cmd_ba->add_option("--lambda", ba_lambda)->required();
    cmd_ba->add_option("--set", ba_set)->capture_default_str();
    cmd_ba->add_option("--delta", ba_delta)->capture_default_str();
    cmd_ba->add_option("--slopes", ba_slopes, "number of slopes in the sweep")->capture_default_str();
    cmd_ba->add_option("--dlo", ba_dlo, "distortion window low end for the slope grid")->capture_default_str();
    cmd_ba->add_option("--dhi", ba_dhi, "distortion window high end")->capture_default_str();
    cmd_ba->add_option("--resolution", ba_resolution, "grid size for interval/all sets")->capture_default_str();
    cmd_ba->add_option("--out", ba_out)->capture_default_str();

    // ---- deltascale ----
    auto* cmd_ds = app.add_subcommand("deltascale", "discretization scaling table");
    double ds_lambda = 1;
    std::string ds_set = "finite:0,1", ds_alpha = "0.5,0.5,0,0", ds_beta = "1,0,0,0";
    std::string ds_deltas = "1e-2,1e-3,1e-4", ds_mode = "single", ds_out = "-";
    std::string ds_p = "0.25,0.5", ds_mu = "0.5,1";
    std::string ds_alpha2 = "0.4,0.3,0.2,0.1", ds_beta2 = "0.1,0.2,0.3,0.4";
    cmd_ds->add_option("--lambda", ds_lambda)->required();
    cmd_ds->add_option("--mode", ds_mode, "single | ceo")->capture_default_str();
    cmd_ds->add_option("--set", ds_set)->capture_default_str();
    cmd_ds->add_option("--alpha", ds_alpha, "alpha atoms (encoder 1 in ceo mode)")->capture_default_str();
    cmd_ds->add_option("--beta", ds_beta, "beta atoms (encoder 1 in ceo mode)")->capture_default_str();
    cmd_ds->add_option("--alpha2", ds_alpha2, "encoder-2 alpha atoms (ceo mode)")->capture_default_str();
    cmd_ds->add_option("--beta2", ds_beta2, "encoder-2 beta atoms (ceo mode)")->capture_default_str();
    cmd_ds->add_option("--p", ds_p, "thinning probabilities p1,p2 (ceo mode)")->capture_default_str();
    cmd_ds->add_option("--mu", ds_mu, "noise rates mu1,mu2 (ceo mode)")->capture_default_str();
    cmd_ds->add_option("--deltas", ds_deltas)->capture_default_str();
    cmd_ds->add_option("--out", ds_out)->capture_default_str();

    // ---- sdpi ----
    auto* cmd_sdpi = app.add_subcommand("sdpi", "strong data processing checks");
    std::string sdpi_mode, sdpi_seed, sdpi_out = "-";
    int sdpi_models = 100;
    std::string sdpi_pgrid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    double sdpi_mu = 0.5;
    std::string sdpi_deltas = "0.05,0.02,0.01";
    cmd_sdpi->add_option("mode", sdpi_mode, "thin | super")->required();
    cmd_sdpi->add_option("--models", sdpi_models)->capture_default_str();
    cmd_sdpi->add_option("--seed", sdpi_seed, "master seed (PPCOVER_SEED fallback)");
    cmd_sdpi->add_option("--p-grid", sdpi_pgrid, "thinning probabilities (thin mode)")->capture_default_str();
    cmd_sdpi->add_option("--mu", sdpi_mu, "noise rate (super mode)")->capture_default_str();
    cmd_sdpi->add_option("--deltas", sdpi_deltas, "slot widths (super mode)")->capture_default_str();
    cmd_sdpi->add_option("--out", sdpi_out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cmd_frontier) {
            const auto A = ppcover::ReconSet::parse(fr_set);
            auto f = ppcover::constrained_frontier(fr_lambda, A,
                                                   ppcover::default_weight_grid(fr_weights, fr_wmin, fr_wmax),
                                                   fr_refine, {}, 2048, threads);
            OutFile out(fr_out);
            ppcover::write_frontier_csv(f, out.stream());
            auto j = ppcover::frontier_sidecar(f);
            j["command"] = "frontier";
            j["lambda"] = fr_lambda;
            j["set"] = A.to_string();
            write_sidecar(out, j);
        } else if (*cmd_ceo) {
            const auto p = parse_pair(ceo_p, "--p");
            const auto mu = parse_pair(ceo_mu, "--mu");
            auto f = ppcover::ceo_frontier(ceo_lambda, p[0], p[1], mu[0], mu[1],
                                           ppcover::default_weight_pairs(ceo_weights), {}, threads);
            OutFile out(ceo_out);
            ppcover::write_frontier_csv(f, out.stream());
            auto j = ppcover::frontier_sidecar(f);
            j["command"] = "ceo";
            j["lambda"] = ceo_lambda;
            j["p"] = p;
            j["mu"] = mu;
            write_sidecar(out, j);
        } else if (*cmd_remote) {
            auto f = ppcover::remote_frontier(rem_lambda, rem_p, rem_mu,
                                              ppcover::default_weight_grid(rem_weights), {}, threads);
            OutFile out(rem_out);
            ppcover::write_frontier_csv(f, out.stream());
            auto j = ppcover::frontier_sidecar(f);
            j["command"] = "remote";
            j["lambda"] = rem_lambda;
            j["p"] = rem_p;
            j["mu"] = rem_mu;
            write_sidecar(out, j);
        } else if (*cmd_sim) {
            const std::uint64_t seed = resolve_seed(sim_seed);
            const auto rep = ppcover::simulate(sim_lambda, sim_T, sim_R, sim_trials, seed, threads);
            OutFile out(sim_out);
            out.stream() << ppcover::report_json(rep).dump(2) << "\n";
        } else if (*cmd_ba) {
            const auto A = ppcover::ReconSet::parse(ba_set);
            const auto slopes =
                ppcover::ba_slope_grid_for_window(ba_lambda, ba_delta, ba_dlo, ba_dhi, ba_slopes);
            const auto rows = ppcover::ba_frontier(ba_lambda, A, ba_delta, slopes, ba_resolution);
            OutFile out(ba_out);
            ppcover::write_ba_csv(rows, out.stream());
        } else if (*cmd_ds) {
            const auto deltas = parse_list(ds_deltas);
            OutFile out(ds_out);
            if (ds_mode == "single") {
                const auto A = ppcover::ReconSet::parse(ds_set);
                const auto rows = ppcover::delta_scaling_single(
                    ds_lambda, A, parse_atoms(ds_alpha, "--alpha"), parse_atoms(ds_beta, "--beta"), deltas);
                ppcover::write_deltascale_csv(rows, out.stream());
            } else if (ds_mode == "ceo") {
                const auto p = parse_pair(ds_p, "--p");
                const auto mu = parse_pair(ds_mu, "--mu");
                const std::array<ppcover::TestChannel, 2> ch{
                    ppcover::TestChannel{parse_atoms(ds_alpha, "--alpha"), parse_atoms(ds_beta, "--beta")},
                    ppcover::TestChannel{parse_atoms(ds_alpha2, "--alpha2"), parse_atoms(ds_beta2, "--beta2")}};
                const auto rows = ppcover::delta_scaling_ceo(ds_lambda, p, mu, ch, deltas);
                ppcover::write_deltascale_ceo_csv(rows, out.stream());
            } else {
                throw CLI::ValidationError("--mode must be single or ceo");
            }
        } else if (*cmd_sdpi) {
            const std::uint64_t seed = resolve_seed(sdpi_seed);
            OutFile out(sdpi_out);
            if (sdpi_mode == "thin") {
                const auto rows = ppcover::thinning_batch(sdpi_models, seed, parse_list(sdpi_pgrid));
                ppcover::write_sdpi_csv(rows, out.stream());
            } else if (sdpi_mode == "super") {
                const auto rows =
                    ppcover::superposition_batch(sdpi_models, seed, sdpi_mu, parse_list(sdpi_deltas));
                ppcover::write_sdpi_csv(rows, out.stream());
            } else {
                throw CLI::ValidationError("sdpi mode must be thin or super");
            }
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitOk;
}
