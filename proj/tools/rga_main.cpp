#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rga/suites.hpp"

namespace {

int run(const std::string& suite, const rga::SuiteConfig& cfg,
        const std::string& out_json, const std::string& out_csv) {
    rga::VerificationReport rep = rga::run_suite(suite, cfg);
    int total = 0, passed = 0;
    for (const rga::Metric& m : rep.metrics) {
        if (!m.pass.has_value()) continue;
        ++total;
        if (*m.pass) {
            ++passed;
        } else {
            std::printf("[FAIL] %-48s value=%.6e", m.name.c_str(), m.value);
            if (m.bound) std::printf(" bound=%.6e", *m.bound);
            std::printf("\n");
        }
    }
    if (!out_json.empty()) rga::emit_json(rep, out_json, cfg.timing);
    if (!out_csv.empty()) rga::emit_csv(rep, out_csv);
    std::printf("suite %-12s checked=%d passed=%d metrics=%zu elapsed=%.2fs\n",
                suite.c_str(), total, passed, rep.metrics.size(), rep.wall_time_s);
    bool ok = passed == total;
    std::printf("RESULT %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid verification toolkit for reflection-group multiscale analysis"};
    app.require_subcommand(1);

    rga::SuiteConfig cfg;
    std::string out_json, out_csv;
    std::vector<CLI::App*> subs;
    for (const std::string& name : rga::suite_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " suite");
        sub->add_option("-g,--group", cfg.group,
                        "group preset: A1, A1xA1, B2, A2, TRIVIAL, I2:m")
            ->envname("RGA_GROUP");
        sub->add_option("--roots", cfg.root_file, "root system file (overrides preset)")
            ->envname("RGA_ROOTS");
        sub->add_option("--dim", cfg.trivial_dim, "ambient dimension for TRIVIAL")
            ->envname("RGA_DIM");
        sub->add_option("-n,--points", cfg.n, "grid points per axis")
            ->envname("RGA_POINTS");
        sub->add_option("--box", cfg.box, "half-width of the box")->envname("RGA_BOX");
        sub->add_option("--kmin", cfg.k_min, "coarsest scale index")->envname("RGA_KMIN");
        sub->add_option("--kmax", cfg.k_max, "finest scale index")->envname("RGA_KMAX");
        sub->add_option("-M,--widen", cfg.M_values, "widening values (repeatable)")
            ->envname("RGA_WIDEN");
        sub->add_option("--tol", cfg.tol, "inversion tail tolerance")->envname("RGA_TOL");
        sub->add_option("--seed", cfg.seed, "sampling seed")->envname("RGA_SEED");
        sub->add_option("--budget", cfg.sample_budget, "sampling budget")
            ->envname("RGA_BUDGET");
        sub->add_flag("--parallel", cfg.parallel, "run combined suite parts concurrently")
            ->envname("RGA_PARALLEL");
        sub->add_flag("--timing", cfg.timing, "include wall time in emitted reports")
            ->envname("RGA_TIMING");
        sub->add_option("-o,--out", out_json, "write the JSON report here")
            ->envname("RGA_OUT");
        sub->add_option("--csv", out_csv, "write the CSV report here")
            ->envname("RGA_CSV");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* sub : subs)
            if (sub->parsed()) return run(sub->get_name(), cfg, out_json, out_csv);
    } catch (const rga::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
