#include "ksum/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ksum/bench.hpp"
#include "ksum/dataset.hpp"
#include "ksum/error.hpp"
#include "ksum/fastsum.hpp"
#include "ksum/ica.hpp"
#include "ksum/kernel.hpp"
#include "ksum/mdh.hpp"
#include "ksum/model_io.hpp"
#include "ksum/ppr.hpp"
#include "ksum/simulate.hpp"
#include "ksum/smoothers.hpp"

namespace ksum {

namespace {

std::vector<double> parse_beta(const std::string& text) {
    std::vector<double> beta;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            beta.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw invalid_input("bad kernel coefficient: '" + tok + "'");
        }
    }
    return beta;
}

void write_output(const std::string& out, const Dataset& data) {
    if (out.empty() || out == "-")
        write_csv(std::cout, data);
    else
        write_csv_file(out, data);
}

BandwidthSpec bandwidth_from_flags(std::optional<double> h, std::optional<double> silver,
                                   bool cv) {
    int given = (h ? 1 : 0) + (silver ? 1 : 0) + (cv ? 1 : 0);
    if (given > 1) throw invalid_input("choose exactly one of --h, --silverman, --cv");
    if (h) return BandwidthSpec::fixed(*h);
    if (cv) return BandwidthSpec::cv();
    return BandwidthSpec::silverman(silver.value_or(1.0));
}

std::vector<std::uint64_t> seed_sequence(std::uint64_t base, int count) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) seeds[static_cast<std::size_t>(i)] = base + i;
    return seeds;
}

void emit_report(const BenchReport& report, const std::string& format,
                 const std::string& out) {
    if (format == "table") {
        if (out.empty() || out == "-") {
            report_table(std::cout, report);
        } else {
            std::ofstream f(out);
            if (!f) throw invalid_input("cannot write file: " + out);
            report_table(f, report);
        }
    } else {
        write_output(out, report_to_dataset(report));
    }
}

int run_parsed(CLI::App& app, int argc, const char* const* argv) {
    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"exact univariate kernel sums, smoothing and projection pursuit"};
    app.require_subcommand(1);
    // several subcommands expose --h (bandwidth), so help loses its -h alias
    app.set_help_flag("--help", "print help and exit");
    auto subcommand = [](CLI::App* parent, const std::string& name,
                         const std::string& desc) {
        CLI::App* s = parent->add_subcommand(name, desc);
        s->set_help_flag("--help", "print help and exit");
        s->fallthrough(); // global --seed/--out/--format may follow the subcommand
        return s;
    };

    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    app.add_option("--seed", seed, "base seed for stochastic commands");
    app.add_option("--out", out, "output path ('-' for stdout)");
    app.add_option("--format", format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}));

    std::string beta_text = "0.25,0.25";
    std::string data_path, eval_path, model_path, col = "1", wcol, xcol = "1",
                                                  ycol = "2", kind = "bimodal",
                                                  method = "nw";
    std::optional<double> opt_h, opt_silverman;
    std::string c_text = "auto";
    bool flag_cv = false;
    std::optional<int> nbin;
    double h = 0.5, hmult_ica = 1.5, hmult_mdh = 1.0, alphamax = 1.0;
    int grid_n = 500, it = 20, ncomp = 1, nterms = 1, grid_out = 1000, reps = 5,
        nseeds = 20;
    std::size_t sim_n = 1000, sim_d = 0, bn = 2000, bd = 4, bclusters = 10;
    std::string mode = "sum", sizes_text = "65536,131072,262144,524288,1048576";

    // kernel curve
    auto* kernel_cmd = subcommand(&app, "kernel", "kernel family utilities");
    auto* curve_cmd = subcommand(kernel_cmd, "curve", "unit-variance kernel curve");
    curve_cmd->add_option("--beta", beta_text, "kernel coefficients");
    curve_cmd->add_option("--n", grid_n, "grid size");

    // sum
    auto* sum_cmd = subcommand(&app, "sum", "kernel and kernel-derivative sums");
    sum_cmd->add_option("--data", data_path, "sample CSV")->required();
    sum_cmd->add_option("--col", col, "sample column (name or 1-based index)");
    sum_cmd->add_option("--weights", wcol, "weight column");
    sum_cmd->add_option("--h", h, "bandwidth")->required();
    sum_cmd->add_option("--beta", beta_text, "kernel coefficients");
    sum_cmd->add_option("--eval", eval_path, "evaluation points CSV (first column)");
    sum_cmd->add_option("--nbin", nbin, "bin count for the binned approximation");
    sum_cmd->add_option("--mode", mode, "sum, dsum or both")
        ->check(CLI::IsMember({"sum", "dsum", "both"}));

    // density
    auto* dens_cmd = subcommand(&app, "density", "kernel density estimate");
    dens_cmd->add_option("--data", data_path, "sample CSV")->required();
    dens_cmd->add_option("--col", col, "sample column");
    dens_cmd->add_option("--beta", beta_text, "kernel coefficients");
    dens_cmd->add_option("--h", opt_h, "fixed bandwidth");
    dens_cmd->add_option("--silverman", opt_silverman, "Silverman multiplier");
    dens_cmd->add_flag("--cv", flag_cv, "leave-one-out pseudo-likelihood bandwidth");
    dens_cmd->add_option("--nbin", nbin, "bin count");
    dens_cmd->add_option("--grid", grid_out, "evaluation grid size");

    // regress
    auto* reg_cmd = subcommand(&app, "regress", "kernel regression");
    reg_cmd->add_option("--data", data_path, "sample CSV")->required();
    reg_cmd->add_option("--x", xcol, "covariate column");
    reg_cmd->add_option("--y", ycol, "response column");
    reg_cmd->add_option("--method", method, "nw or loclin")
        ->check(CLI::IsMember({"nw", "loclin"}));
    reg_cmd->add_option("--beta", beta_text, "kernel coefficients");
    reg_cmd->add_option("--h", opt_h, "fixed bandwidth");
    reg_cmd->add_option("--silverman", opt_silverman, "Silverman multiplier");
    reg_cmd->add_flag("--cv", flag_cv, "leave-one-out squared-error bandwidth");
    reg_cmd->add_option("--nbin", nbin, "bin count");
    reg_cmd->add_option("--grid", grid_out, "evaluation grid size");

    // ica
    auto* ica_cmd = subcommand(&app, "ica", "independent component analysis");
    ica_cmd->add_option("--data", data_path, "data CSV")->required();
    ica_cmd->add_option("--ncomp", ncomp, "components to extract")->required();
    ica_cmd->add_option("--beta", beta_text, "kernel coefficients");
    ica_cmd->add_option("--hmult", hmult_ica, "bandwidth multiplier");
    ica_cmd->add_option("--it", it, "optimisation steps per component");
    ica_cmd->add_option("--nbin", nbin, "bin count");

    // mdh
    auto* mdh_cmd = subcommand(&app, "mdh", "minimum density hyperplane");
    mdh_cmd->add_option("--data", data_path, "data CSV")->required();
    mdh_cmd->add_option("--beta", beta_text, "kernel coefficients");
    mdh_cmd->add_option("--hmult", hmult_mdh, "bandwidth multiplier");
    mdh_cmd->add_option("--alphamax", alphamax, "maximum scaled hyperplane distance");
    mdh_cmd->add_option("--C", c_text, "penalty constant (number or 'auto')");

    // ppr
    auto* ppr_cmd = subcommand(&app, "ppr", "projection pursuit regression");
    auto* ppr_fit_cmd = subcommand(ppr_cmd, "fit", "fit a model");
    ppr_fit_cmd->add_option("--data", data_path, "data CSV")->required();
    ppr_fit_cmd->add_option("--y", ycol, "response column")->required();
    ppr_fit_cmd->add_option("--nterms", nterms, "number of components")->required();
    ppr_fit_cmd->add_option("--beta", beta_text, "kernel coefficients");
    auto* ppr_pred_cmd = subcommand(ppr_cmd, "predict", "predict from a model");
    ppr_pred_cmd->add_option("--model", model_path, "model JSON")->required();
    ppr_pred_cmd->add_option("--data", data_path, "covariate CSV")->required();

    // bench
    auto* bench_cmd = subcommand(&app, "bench", "benchmark harness");
    auto* bs = subcommand(bench_cmd, "scaling", "fast vs naive timing");
    bs->add_option("--sizes", sizes_text, "comma-separated ascending sizes");
    bs->add_option("--reps", reps, "repetitions per timing (median)");
    bs->add_option("--beta", beta_text, "kernel coefficients");
    auto* bi = subcommand(bench_cmd, "ica", "component recovery");
    bi->add_option("--seeds", nseeds, "number of seeds");
    bi->add_option("--n", bn, "rows per case");
    bi->add_option("--d", bd, "components");
    auto* bm = subcommand(bench_cmd, "mdh", "hyperplane separation");
    bm->add_option("--seeds", nseeds, "number of seeds");
    bm->add_option("--n", bn, "rows per case");
    bm->add_option("--d", bd, "dimensions");
    bm->add_option("--clusters", bclusters, "mixture components");
    auto* bp = subcommand(bench_cmd, "ppr", "regression recovery");
    bp->add_option("--seeds", nseeds, "number of seeds");
    bp->add_option("--n", bn, "rows per case");
    bp->add_option("--d", bd, "dimensions");

    // simulate
    auto* sim_cmd = subcommand(&app, "simulate", "synthetic data generators");
    sim_cmd->add_option("--kind", kind, "bimodal, sinekink, gaussmix, icamix or ppr")
        ->check(CLI::IsMember({"bimodal", "sinekink", "gaussmix", "icamix", "ppr"}));
    sim_cmd->add_option("--n", sim_n, "rows")->required();
    sim_cmd->add_option("--d", sim_d, "dimensions (generator default when 0)");

    if (int rc = run_parsed(app, argc, argv); rc != 0 || app.get_subcommands().empty())
        return rc;

    try {
        const PolyExpKernel kernel(parse_beta(beta_text));

        if (curve_cmd->parsed()) {
            auto curve = kernel_curve(kernel, grid_n);
            Dataset outd;
            outd.names = {"u", "density"};
            outd.columns.assign(2, {});
            for (auto [u, f] : curve) {
                outd.columns[0].push_back(u);
                outd.columns[1].push_back(f);
            }
            write_output(out, outd);
        } else if (sum_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            WeightedSample sample;
            sample.values = d.columns[d.column_index(col)];
            sample.weights = wcol.empty() ? std::vector<double>(sample.values.size(), 1.0)
                                          : d.columns[d.column_index(wcol)];
            std::vector<double> eval =
                eval_path.empty() ? sample.values
                                  : load_csv(eval_path).columns[0];
            SumMode m = mode == "sum"    ? SumMode::ksum
                        : mode == "dsum" ? SumMode::dksum
                                         : SumMode::both;
            KernelSums sums = fk_sum(sample, h, kernel, eval, m, nbin);
            Dataset outd;
            outd.names = {"x_eval"};
            outd.columns = {eval};
            if (!sums.ksum.empty()) {
                outd.names.push_back("ksum");
                outd.columns.push_back(std::move(sums.ksum));
            }
            if (!sums.dksum.empty()) {
                outd.names.push_back("dksum");
                outd.columns.push_back(std::move(sums.dksum));
            }
            write_output(out, outd);
        } else if (dens_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            const std::vector<double>& x = d.columns[d.column_index(col)];
            BandwidthSpec spec = bandwidth_from_flags(opt_h, opt_silverman, flag_cv);
            double hh = resolve_density_bandwidth(spec, x, kernel);
            auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            std::vector<double> grid(static_cast<std::size_t>(grid_out));
            double a = *lo - 10.0 * hh, b = *hi + 10.0 * hh;
            for (std::size_t i = 0; i < grid.size(); ++i)
                grid[i] = a + (b - a) * static_cast<double>(i) /
                                  static_cast<double>(grid.size() - 1);
            DensityEstimate est = kde(x, hh, kernel, grid, nbin);
            Dataset outd;
            outd.names = {"x", "density"};
            outd.columns = {std::move(est.eval_points), std::move(est.density)};
            write_output(out, outd);
        } else if (reg_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            const std::vector<double>& x = d.columns[d.column_index(xcol)];
            const std::vector<double>& y = d.columns[d.column_index(ycol)];
            BandwidthSpec spec = bandwidth_from_flags(opt_h, opt_silverman, flag_cv);
            double hh = resolve_regression_bandwidth(spec, x, y, kernel);
            auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            std::vector<double> grid(static_cast<std::size_t>(grid_out));
            for (std::size_t i = 0; i < grid.size(); ++i)
                grid[i] = *lo + (*hi - *lo) * static_cast<double>(i) /
                                    static_cast<double>(grid.size() - 1);
            RegressionEstimate est =
                method == "nw" ? nw_regression(x, y, hh, kernel, grid, nbin)
                               : loclin_regression(x, y, hh, kernel, grid, nbin);
            Dataset outd;
            outd.names = {"x", "fit"};
            outd.columns = {std::move(est.eval_points), std::move(est.fitted)};
            write_output(out, outd);
        } else if (ica_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            Matrix x = to_matrix(d);
            ICAOptions opt;
            opt.ncomp = static_cast<std::size_t>(ncomp);
            opt.hmult = hmult_ica;
            opt.it = it;
            opt.nbin = nbin;
            ICAModel model = ica_fit(x, opt, kernel);
            std::string model_out = out.empty() ? "ica_model.json" : out;
            std::string sources_out;
            if (auto comma = model_out.find(','); comma != std::string::npos) {
                sources_out = model_out.substr(comma + 1);
                model_out = model_out.substr(0, comma);
            }
            save_ica_model(model_out, model);
            if (!sources_out.empty())
                write_csv_file(sources_out, from_matrix(model.sources, "s"));
        } else if (mdh_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            Matrix x = to_matrix(d);
            MDHOptions opt;
            opt.hmult = hmult_mdh;
            opt.alphamax = alphamax;
            if (c_text != "auto") {
                try {
                    opt.C = std::stod(c_text);
                } catch (const std::exception&) {
                    throw invalid_input("bad --C value: '" + c_text + "'");
                }
            }
            MDHModel model = mdh_fit(x, opt, kernel);
            save_mdh_model(out.empty() ? "mdh_model.json" : out, model);
        } else if (ppr_fit_cmd->parsed()) {
            Dataset d = load_csv(data_path);
            std::size_t yidx = d.column_index(ycol);
            std::vector<std::size_t> xcols;
            for (std::size_t j = 0; j < d.ncol(); ++j)
                if (j != yidx) xcols.push_back(j);
            Matrix x = to_matrix(d, xcols);
            PPRModel model = ppr_fit(x, d.columns[yidx], nterms, kernel);
            save_ppr_model(out.empty() ? "ppr_model.json" : out, model);
        } else if (ppr_pred_cmd->parsed()) {
            PPRModel model = load_ppr_model(model_path);
            Dataset d = load_csv(data_path);
            Matrix x = to_matrix(d);
            std::vector<double> pred = ppr_predict(model, x);
            Dataset outd;
            outd.names = {"prediction"};
            outd.columns = {std::move(pred)};
            write_output(out, outd);
        } else if (bs->parsed()) {
            std::vector<std::size_t> sizes;
            std::stringstream ss(sizes_text);
            std::string tok;
            while (std::getline(ss, tok, ','))
                sizes.push_back(static_cast<std::size_t>(std::stoull(tok)));
            emit_report(bench_scaling(sizes, kernel, reps), format, out);
        } else if (bi->parsed()) {
            emit_report(bench_ica(seed_sequence(seed, nseeds), bn, bd), format, out);
        } else if (bm->parsed()) {
            emit_report(bench_mdh(seed_sequence(seed, nseeds), bn, bd, bclusters),
                        format, out);
        } else if (bp->parsed()) {
            emit_report(bench_ppr(seed_sequence(seed, nseeds), bn, bd), format, out);
        } else if (sim_cmd->parsed()) {
            write_output(out, simulate_dataset(kind, sim_n, sim_d, seed));
        } else {
            std::cerr << app.help() << '\n';
            return 2;
        }
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

} // namespace ksum
