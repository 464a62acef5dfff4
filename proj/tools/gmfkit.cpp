// gmfkit command-line front end.
//
//   gmfkit classify-jet --input jet.json [--tol 1e-9]
//   gmfkit trace-family (--family f.json | --preset cusp) [--t0 -1 --t1 1 --steps 40 --box 2] [--out events.csv]
//   gmfkit series --object bo --d 2 [--n 1] [--max-degree 32]
//   gmfkit verify --check all --d 3 [--max-degree 32] [--structure o]
//
// Exit codes: 0 success, 1 check failure or degenerate family, 2 malformed
// input or unknown name, 3 dimension mismatch.

#include "gmfkit/errors.hpp"
#include "gmfkit/family_analysis.hpp"
#include "gmfkit/graded_f2.hpp"
#include "gmfkit/jet_core.hpp"
#include "gmfkit/moduli_calc.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace gmfkit;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitDimension = 3;

int default_truncation() {
    if (const char* env = std::getenv("GMFKIT_MAX_DEGREE")) {
        try {
            const int n = std::stoi(env);
            if (n >= 0) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid GMFKIT_MAX_DEGREE=" << env << "\n";
    }
    return f2::kDefaultTruncation;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    return nlohmann::json::parse(in);
}

struct ClassifyArgs {
    std::string input;
    double tol = jet::kDefaultTol;
};

int run_classify(const ClassifyArgs& a) {
    try {
        const jet::Jet3 j = jet::jet_from_json(read_json_file(a.input));
        std::cout << jet::to_json(jet::analyze(j, a.tol)).dump() << "\n";
        return 0;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed jet JSON: " << e.what() << "\n";
        return kExitInput;
    } catch (const SchemaError& e) {
        std::cerr << "malformed jet JSON: " << e.what() << "\n";
        return kExitInput;
    } catch (const DimensionError& e) {
        std::cerr << "dimension mismatch: " << e.what() << "\n";
        return kExitDimension;
    }
}

struct TraceArgs {
    std::string family;
    std::string preset;
    double t0 = -1.0;
    double t1 = 1.0;
    int steps = 40;
    double box = 2.0;
    int grid = 0;
    std::string out;
};

int auto_grid(int d) {
    if (d <= 2) return 9;
    if (d == 3) return 6;
    return 4;
}

int run_trace(const TraceArgs& a) {
    std::optional<family::PolyFamily> fam;
    try {
        if (!a.family.empty() == !a.preset.empty())
            throw SchemaError("exactly one of --family and --preset is required");
        fam = a.preset.empty() ? family::family_from_json(read_json_file(a.family)) : family::preset(a.preset);
        if (fam->param_dim() != 1) throw SchemaError("trace-family needs a one-parameter family");
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed family JSON: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "invalid family: " << e.what() << "\n";
        return kExitInput;
    }
    if (a.steps < 1 || !(a.box > 0.0) || !(a.t1 > a.t0)) {
        std::cerr << "need --steps >= 1, --box > 0 and --t1 > --t0\n";
        return kExitInput;
    }

    family::TraceOptions opts;
    opts.box = family::Box{-a.box, a.box};
    opts.grid_per_axis = a.grid > 0 ? a.grid : auto_grid(fam->fiber_dim());
    const family::AxiomReport report = family::check_family_axioms(*fam, a.t0, a.t1, a.steps, opts);

    const std::string csv = family::events_csv(report.events, fam->fiber_dim());
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) {
            std::cerr << "cannot write " << a.out << "\n";
            return kExitInput;
        }
        out << csv;
    } else {
        std::cout << csv;
    }

    bool axiom_iv = false;
    std::ostringstream summary;
    summary << "# summary events=" << report.events.size() << " degenerate=" << report.degenerate.size();
    for (const auto& v : report.axioms) {
        const std::string tag = v.axiom.substr(0, v.axiom.find(' '));
        summary << " " << tag << "=" << family::to_string(v.verdict);
        if (tag == "(iv)") axiom_iv = v.verdict == family::Verdict::Pass;
    }
    std::cout << summary.str() << "\n";
    for (const auto& flag : report.degenerate) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", flag.t);
        std::cout << "# degenerate t=" << buf << " reason=" << jet::reason_name(flag.reason) << "\n";
    }
    if (!report.degenerate.empty()) return kExitFail;
    return axiom_iv ? 0 : kExitFail;
}

struct SeriesArgs {
    std::string object;
    int d = 1;
    int n = 1;
    int max_degree = 0;
};

int run_series(const SeriesArgs& a) {
    static const std::set<std::string> objects = {"bo",     "bso",          "grassmann", "sigma-mf", "sigma-gmf",
                                                  "cofiber", "wedge-target", "mt",        "mtso",     "mtgmf"};
    if (!objects.count(a.object)) {
        std::cerr << "unknown object '" << a.object << "'\n";
        return kExitInput;
    }
    const int N = a.max_degree;
    nlohmann::json out;
    moduli::Provenance prov = moduli::Provenance::Exact;
    try {
        if (a.object == "bo") {
            out = f2::to_json(f2::series_BO(a.d, N));
        } else if (a.object == "bso") {
            out = f2::to_json(moduli::classifying_series(moduli::Structure::SO, a.d, N));
        } else if (a.object == "grassmann") {
            out = f2::to_json(f2::series_grassmannian(a.d, a.n, N));
            out["n"] = a.n;
        } else if (a.object == "sigma-mf") {
            out = f2::to_json(moduli::sigma_mf_series(a.d, N));
        } else if (a.object == "sigma-gmf") {
            out = f2::to_json(moduli::hocolim_series(moduli::gmf_zigzag(a.d, N)).series);
        } else if (a.object == "cofiber") {
            out = f2::to_json(moduli::cofiber_series(a.d, N));
        } else if (a.object == "wedge-target") {
            out = f2::to_json(moduli::wedge_target_series(a.d, N));
        } else {
            moduli::SpectrumSeries s;
            if (a.object == "mt") s = moduli::mt_series(a.d, N, moduli::Structure::O);
            else if (a.object == "mtso") s = moduli::mt_series(a.d, N, moduli::Structure::SO);
            else s = moduli::mtgmf_series(a.d, N);
            out = f2::to_json(s.series);
            prov = s.provenance;
            out["derivation"] = s.derivation;
            if (s.lower) out["lower"] = f2::to_json(*s.lower);
            if (s.upper) out["upper"] = f2::to_json(*s.upper);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitInput;
    }
    out["object"] = a.object;
    out["d"] = a.d;
    out["provenance"] = moduli::to_string(prov);
    std::cout << out.dump() << "\n";
    return 0;
}

struct VerifyArgs {
    std::string check;
    int d = 3;
    int max_degree = 0;
    std::string structure = "o";
};

int run_verify(const VerifyArgs& a) {
    static const std::vector<std::string> all = {"gysin",        "hocolim-cofiber",      "connectivity",
                                                 "d1-oracle",    "sigma-mf-cofibration", "mtgmf-bounds"};
    std::vector<std::string> checks;
    if (a.check == "all") checks = all;
    else if (std::find(all.begin(), all.end(), a.check) != all.end()) checks = {a.check};
    else {
        std::cerr << "unknown check '" << a.check << "'\n";
        return kExitInput;
    }
    moduli::Structure s;
    try {
        s = charclass::structure_from_string(a.structure);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
    if (a.d < 1 || a.max_degree < 0) {
        std::cerr << "need --d >= 1 and --max-degree >= 0\n";
        return kExitInput;
    }

    const int N = a.max_degree;
    std::optional<moduli::HocolimResult> h;
    auto hocolim = [&]() -> const moduli::HocolimResult& {
        // One degree past N so the mtgmf bounds see b_{N+1}.
        if (!h) h = moduli::hocolim_series(moduli::gmf_zigzag(a.d, N + 1));
        return *h;
    };

    nlohmann::json records = nlohmann::json::array();
    bool ok = true;
    for (const auto& name : checks) {
        moduli::CheckRecord r;
        if (name == "gysin") r = moduli::gysin_check(a.d, N, s);
        else if (name == "hocolim-cofiber") r = moduli::hocolim_cofiber_check(a.d, N, hocolim());
        else if (name == "connectivity") r = moduli::connectivity_check(a.d, N, hocolim());
        else if (name == "d1-oracle") r = moduli::d1_oracle_check(N);
        else if (name == "sigma-mf-cofibration") r = moduli::sigma_mf_cofibration_check(a.d, N, hocolim());
        else r = moduli::mtgmf_bounds_check(a.d, N, hocolim());
        const bool pass = r.verdict == moduli::Verdict::Pass ||
                          (name == "mtgmf-bounds" && r.verdict == moduli::Verdict::Interval);
        ok = ok && pass;
        records.push_back(moduli::to_json(r));
    }
    std::cout << nlohmann::json{{"records", records}, {"all_pass", ok}}.dump(2) << "\n";
    return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Morse jets, families and mod-2 series of their moduli"};
    app.require_subcommand(1);
    const int truncation = default_truncation();

    ClassifyArgs ca;
    auto* classify = app.add_subcommand("classify-jet", "Classify a 3-jet read from JSON");
    classify->add_option("--input", ca.input, "Jet JSON file")->required();
    classify->add_option("--tol", ca.tol, "Classification tolerance");

    TraceArgs ta;
    auto* trace = app.add_subcommand("trace-family", "Locate birth-death events of a one-parameter family");
    trace->add_option("--family", ta.family, "Family JSON file");
    trace->add_option("--preset", ta.preset, "cusp, swallowtail or suspended-cusp-<i>");
    trace->add_option("--t0", ta.t0, "Window start");
    trace->add_option("--t1", ta.t1, "Window end");
    trace->add_option("--steps", ta.steps, "Sample intervals");
    trace->add_option("--box", ta.box, "Half-width of the search box on each fiber axis");
    trace->add_option("--grid", ta.grid, "Newton seeds per axis (0 picks by fiber dimension)");
    trace->add_option("--out", ta.out, "Write the events CSV here instead of stdout");

    SeriesArgs sa;
    sa.max_degree = truncation;
    auto* series = app.add_subcommand("series", "Print a Poincare series as JSON");
    series->add_option("--object", sa.object, "bo|bso|grassmann|sigma-mf|sigma-gmf|cofiber|wedge-target|mt|mtso|mtgmf")
        ->required();
    series->add_option("--d", sa.d, "Rank or fiber dimension");
    series->add_option("--n", sa.n, "Second Grassmannian parameter");
    series->add_option("--max-degree", sa.max_degree, "Truncation degree");

    VerifyArgs va;
    va.max_degree = truncation;
    auto* verify = app.add_subcommand("verify", "Run series identity checks");
    verify->add_option("--check", va.check,
                       "gysin|hocolim-cofiber|connectivity|d1-oracle|sigma-mf-cofibration|mtgmf-bounds|all")
        ->required();
    verify->add_option("--d", va.d, "Fiber dimension");
    verify->add_option("--max-degree", va.max_degree, "Truncation degree");
    verify->add_option("--structure", va.structure, "o or so (gysin only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*classify) return run_classify(ca);
        if (*trace) return run_trace(ta);
        if (*series) return run_series(sa);
        if (*verify) return run_verify(va);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}
