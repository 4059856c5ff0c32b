// Command line front end. All work happens behind the C interface; this
// file only translates flags into key=value configuration text.

#include "sparselab.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct task_args {
    std::string task;
    std::string out;
    std::string config_file;
    std::map<std::string, std::string> kv;
    std::vector<std::string> raw; // --set key=value pass-through
};

void add_kv_option(CLI::App* cmd, task_args& args, const std::string& flag,
                   const std::string& key, const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.kv[key] = v; }, desc);
}

void add_common(CLI::App* cmd, task_args& args) {
    cmd->add_option("-o,--out", args.out, "write the result CSV here");
    cmd->add_option("-c,--config", args.config_file, "key=value file loaded before the flags");
    cmd->add_option("--set", args.raw, "extra key=value pairs (repeatable)");
    add_kv_option(cmd, args, "--threads", "threads", "worker threads (0 = automatic)");
    add_kv_option(cmd, args, "--seed", "seed", "random seed");
}

std::string assemble(const task_args& args) {
    std::ostringstream text;
    if (!args.config_file.empty()) {
        std::ifstream is(args.config_file);
        if (!is) {
            std::fprintf(stderr, "error: cannot open config file '%s'\n",
                         args.config_file.c_str());
            std::exit(2);
        }
        text << is.rdbuf() << "\n";
    }
    text << "task=" << args.task << "\n";
    for (const auto& kv : args.kv) text << kv.first << "=" << kv.second << "\n";
    for (const std::string& line : args.raw) text << line << "\n";
    return text.str();
}

int execute(const task_args& args) {
    const std::string cfg = assemble(args);
    std::string summary(1 << 16, '\0');
    const int rc = sl_run_kv(cfg.c_str(), args.out.empty() ? nullptr : args.out.c_str(),
                             summary.data(), summary.size());
    if (rc == SL_OK || rc == SL_TOLERANCE) {
        std::fputs(summary.c_str(), stdout);
        if (!args.out.empty()) std::printf("csv: %s\n", args.out.c_str());
        return rc == SL_OK ? 0 : 1;
    }
    std::fprintf(stderr, "error: %s\n", sl_last_error());
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for bilinear spherical averages"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sl_version()));

    std::list<task_args> store;
    task_args* chosen = nullptr;

    const auto make = [&](const char* name, const char* task, const char* desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        store.emplace_back();
        task_args& args = store.back();
        args.task = task;
        add_common(cmd, args);
        cmd->callback([&chosen, &args] { chosen = &args; });
        return std::pair<CLI::App*, task_args*>(cmd, &args);
    };

    {
        auto [cmd, args] = make("sharpness", "sharpness",
                                "concentration-family scaling against the norm product");
        add_kv_option(cmd, *args, "--kind", "kind",
                      "ball_annulus | annuli_ball | knapp_boxes");
        add_kv_option(cmd, *args, "--d", "d", "dimension (default 2)");
        add_kv_option(cmd, *args, "--n", "n", "cells per axis");
        add_kv_option(cmd, *args, "--p", "p", "first exponent, e.g. 2 or 4/3");
        add_kv_option(cmd, *args, "--q", "q", "second exponent");
        add_kv_option(cmd, *args, "--r", "r", "target exponent");
        add_kv_option(cmd, *args, "--deltas", "deltas", "list or halving range a..b");
        add_kv_option(cmd, *args, "--t-lo", "t_lo", "radius window start");
        add_kv_option(cmd, *args, "--t-hi", "t_hi", "radius window end");
    }
    {
        auto [cmd, args] = make("continuity", "continuity",
                                "shift-difference decay of the fixed-radius average");
        add_kv_option(cmd, *args, "--input", "input", "indicator | gaussian");
        add_kv_option(cmd, *args, "--d", "d", "dimension");
        add_kv_option(cmd, *args, "--n", "n", "cells per axis");
        add_kv_option(cmd, *args, "--t", "t", "average radius");
        add_kv_option(cmd, *args, "--hs", "hs", "shift list or halving range");
        add_kv_option(cmd, *args, "--stride", "stride", "norm subgrid stride");
        add_kv_option(cmd, *args, "--r", "r", "norm exponent (default 1)");
    }
    {
        auto [cmd, args] = make("lp-decay", "lp-decay",
                                "frequency-band decay of periodic averages");
        add_kv_option(cmd, *args, "--n", "n", "samples (power of two)");
        add_kv_option(cmd, *args, "--period", "period", "circle length");
        add_kv_option(cmd, *args, "--alpha", "alpha", "spectral decay of the random inputs");
        add_kv_option(cmd, *args, "--ks", "ks", "band list or range a..b");
        add_kv_option(cmd, *args, "--t", "t", "average radius");
        add_kv_option(cmd, *args, "--n-theta", "n_theta", "angular nodes");
        add_kv_option(cmd, *args, "--stride", "stride", "norm subgrid stride");
    }
    {
        auto [cmd, args] = make("sparse-check", "sparse-check",
                                "stopping-time decomposition and domination suite");
        add_kv_option(cmd, *args, "--n1", "n1", "d=1 base resolution");
        add_kv_option(cmd, *args, "--n2", "n2", "d=2 base resolution");
        add_kv_option(cmd, *args, "--count-d1", "count_d1", "d=1 input count");
        add_kv_option(cmd, *args, "--count-d2", "count_d2", "d=2 input count");
        add_kv_option(cmd, *args, "--c0", "c0", "stopping factor (default 2*3^d)");
        add_kv_option(cmd, *args, "--doubled", "doubled", "1 = rerun at doubled resolution");
        add_kv_option(cmd, *args, "--p", "p", "first exponent");
        add_kv_option(cmd, *args, "--q", "q", "second exponent");
        add_kv_option(cmd, *args, "--r", "r", "target exponent");
    }
    {
        auto [cmd, args] = make("radius-perturbation", "radius-perturbation",
                                "oscillation of the linear average under radius windows");
        add_kv_option(cmd, *args, "--n", "n", "cells per axis");
        add_kv_option(cmd, *args, "--d", "d", "dimension");
        add_kv_option(cmd, *args, "--gammas", "gammas", "window width list");
        add_kv_option(cmd, *args, "--epss", "epss", "dilation list or halving range");
        add_kv_option(cmd, *args, "--p", "p", "normalization exponent");
        add_kv_option(cmd, *args, "--r", "r", "norm exponent");
        add_kv_option(cmd, *args, "--ball-radius", "ball_radius", "input ball radius (0 = 4 cells)");
    }
    {
        auto [cmd, args] = make("pointwise-bound", "pointwise-bound",
                                "product-type control of the bilinear maximal function");
        add_kv_option(cmd, *args, "--n", "n", "cells per axis");
        add_kv_option(cmd, *args, "--pairs", "pairs", "random input pairs");
        add_kv_option(cmd, *args, "--c-max", "c_max", "gate on the constant");
        add_kv_option(cmd, *args, "--stride", "stride", "evaluation subgrid stride");
    }
    {
        auto [cmd, args] = make("average", "average", "single bilinear spherical average field");
        add_kv_option(cmd, *args, "--d", "d", "dimension");
        add_kv_option(cmd, *args, "--n", "n", "cells per axis");
        add_kv_option(cmd, *args, "--t", "t", "radius");
        add_kv_option(cmd, *args, "--f", "f", "first region: ball:c:r, annulus:c:a:b, box:lo:hi");
        add_kv_option(cmd, *args, "--g", "g", "second region");
        add_kv_option(cmd, *args, "--n-radial", "n_radial", "slicing nodes");
        add_kv_option(cmd, *args, "--n-ang", "n_ang", "angular nodes per input");
        cmd->add_option_function<std::vector<std::string>>(
            "--box",
            [args](const std::vector<std::string>& v) {
                if (v.size() == 2) {
                    args->kv["box_lo"] = v[0];
                    args->kv["box_hi"] = v[1];
                }
            },
            "box endpoints LO HI")
            ->expected(2);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message plus a usage pointer
        return 2;
    }

    if (!chosen) {
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    }
    return execute(*chosen);
}
