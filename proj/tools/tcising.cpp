// SPDX-License-Identifier: Apache-2.0
//
// tcising: experiment runner.
//
//   tcising ground-scan  --config configs/fig1b.yaml
//   tcising quench       --config configs/fig2a.yaml --out out/
//   tcising trajectories --config configs/figS4c.yaml --threads 4 --seed 7
//   tcising validate
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tcising/cli/commands.hpp"
#include "tcising/cli/config.hpp"
#include "tcising/cli/validate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> tag;
};

tcising::cli::RunConfig resolve(const Overrides& o) {
    auto c = tcising::cli::load_config(o.config);
    if (o.out) c.out_dir = *o.out;
    if (o.seed) c.schedule.seed = *o.seed;
    if (o.threads) {
        TCISING_REQUIRE(*o.threads >= 1, tcising::ErrorCode::ConfigError, "--threads must be >= 1");
        c.schedule.threads = *o.threads;
    }
    if (o.tag) c.tag = *o.tag;
    return c;
}

void add_common(CLI::App* sub, Overrides& o, bool needs_config) {
    auto* opt = sub->add_option("--config", o.config, "run configuration (YAML)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "base seed for trajectory streams");
    sub->add_option("--threads", o.threads, "worker threads for the trajectory ensemble");
    sub->add_option("--tag", o.tag, "output file stem (overrides output.tag)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact-diagonalization simulator for the Tavis-Cummings-Ising chain"};
    app.set_version_flag("--version", TCISING_VERSION);
    app.require_subcommand(1);

    Overrides o;
    auto* scan = app.add_subcommand("ground-scan", "lowest energy over charge sectors on a (h_z, G) grid");
    auto* quench = app.add_subcommand("quench", "unitary dynamics from a classical initial state");
    auto* traj = app.add_subcommand("trajectories", "quantum-jump ensemble with cavity and atom losses");
    auto* val = app.add_subcommand("validate", "run the oracle suite");
    for (auto* s : {scan, quench, traj}) add_common(s, o, true);
    add_common(val, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*val) {
            bool ok = true;
            for (const auto& r : tcising::cli::run_validation()) {
                std::printf("%-26s %s  %s  (%.2fs)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str(),
                            r.seconds);
                ok = ok && r.pass;
            }
            return ok ? kOk : kNumericalFailure;
        }
        const auto cfg = resolve(o);
        if (*scan) {
            const auto res = tcising::cli::cmd_ground_scan(cfg);
            std::printf("ground-scan: %zu points, %zu photon-number jumps -> %s/%s.csv\n", res.points.size(),
                        res.jumps.size(), cfg.out_dir.c_str(), cfg.tag.c_str());
        } else if (*quench) {
            const auto s = tcising::cli::cmd_quench(cfg);
            std::printf("quench: dim %zu, norm drift %.2e, charge drift %.2e, energy drift %.2e -> %s/%s.csv\n", s.dim,
                        s.max_norm_drift, s.max_charge_drift, s.max_energy_drift, cfg.out_dir.c_str(),
                        cfg.tag.c_str());
        } else if (*traj) {
            const auto ens = tcising::cli::cmd_trajectories(cfg);
            std::printf("trajectories: %zu trajectories, %zu jumps, leaked %.2e -> %s/%s.csv\n", ens.n_traj,
                        ens.jump_log.size(), ens.mean_leak, cfg.out_dir.c_str(), cfg.tag.c_str());
        }
    } catch (const tcising::Error& e) {
        std::cerr << "tcising: " << e.what() << '\n';
        return e.is_numerical() ? kNumericalFailure : kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "tcising: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kOk;
}
