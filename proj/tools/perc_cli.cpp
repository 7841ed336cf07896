// Command-line front end.
//
// One subcommand per experiment plus `oracle-verify`, which replays the exact
// small-region referee suites and exits nonzero if anything fails.  Output is
// CSV and/or JSON; with --out, files land in the given directory together
// with a manifest (argument echo, seed, version, timestamps, digests) that
// suffices to reproduce the run.  Bare invocations are reproducible because
// --seed defaults to a fixed constant; pass `--seed random` for entropy.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perc/perc.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::vector<int> n;
    std::vector<double> p;
    std::string p_grid;
    std::int64_t replicas = 10000;
    std::string seed_text = "default";
    int aspect = 1;
    std::string out_dir;
    std::string format = "csv";
    int threads = 0;
    bool condition_origin_open = false;
};

// CLI11's numeric parse reads an empty string as zero, so a typo like
// --p "$unset_var" would run silently at p = 0.  Reject empty values
// before conversion on the options that name the data coordinates.
const CLI::Validator nonempty_value(
    [](std::string& s) {
        return s.empty() ? std::string("empty value") : std::string();
    },
    "NONEMPTY");

void add_common(CLI::App* sub, CommonOpts& o, bool with_aspect) {
    sub->add_option("--n", o.n, "region size n (repeatable)")
        ->required()
        ->check(nonempty_value);
    sub->add_option("--p", o.p, "site probability (repeatable)")
        ->check(nonempty_value);
    sub->add_option("--p-grid", o.p_grid, "probability grid lo:hi:step");
    sub->add_option("--replicas", o.replicas, "Monte Carlo replicas")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed_text,
                    "master seed: unsigned integer, or 'random' for entropy");
    if (with_aspect)
        sub->add_option("--aspect", o.aspect, "rectangle aspect k: [0,kn] x [0,n]")
            ->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out_dir, "directory for output files + manifest");
    sub->add_option("--format", o.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--threads", o.threads, "worker threads, 0 = one per core")
        ->check(CLI::NonNegativeNumber);
}

std::uint64_t resolve_seed(const std::string& text) {
    if (text == "default") return perc::default_master_seed;
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::size_t pos = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(text, &pos, 0);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size())
        throw std::domain_error("--seed must be an unsigned integer or 'random'");
    return value;
}

std::vector<double> resolve_p(const CommonOpts& o, double fallback) {
    if (!o.p_grid.empty() && !o.p.empty())
        throw std::domain_error("--p and --p-grid are mutually exclusive");
    if (!o.p_grid.empty()) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(o.p_grid.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
            throw std::domain_error("--p-grid expects lo:hi:step");
        if (!(step > 0) || hi < lo)
            throw std::domain_error("--p-grid needs lo <= hi and step > 0");
        const auto count = static_cast<std::int64_t>((hi - lo) / step + 1e-9) + 1;
        std::vector<double> grid;
        grid.reserve(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i)
            grid.push_back(lo + static_cast<double>(i) * step);
        return grid;
    }
    if (!o.p.empty()) return o.p;
    return {fallback};
}

std::string iso_utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

json record_json(const perc::EstimateRecord& rec) {
    json j;
    j["kind"] = perc::kind_name(rec.kind);
    j["n"] = rec.n;
    if (std::isnan(rec.p))
        j["p"] = nullptr;
    else
        j["p"] = rec.p;
    j["aspect"] = rec.aspect;
    j["estimate"] = rec.estimate;
    j["stderr"] = rec.std_error;
    j["ci_lo"] = rec.ci_lo;
    j["ci_hi"] = rec.ci_hi;
    j["replicas"] = rec.replicas;
    j["seed"] = rec.seed;
    j["wall_ms"] = rec.wall_ms;
    if (!rec.extras.empty()) {
        json e = json::object();
        for (const auto& [key, value] : rec.extras) e[key] = value;
        j["extras"] = e;
    }
    return j;
}

// Writes requested formats (file mode when --out was given, stdout
// otherwise) and the manifest that makes the run reproducible.
void emit(const std::string& subcommand, const CommonOpts& o,
          const std::vector<std::string>& argv_echo, std::uint64_t master_seed,
          const std::string& started, const std::string& csv, json doc) {
    doc["subcommand"] = subcommand;
    doc["version"] = perc::version_string;
    doc["master_seed"] = master_seed;

    if (o.out_dir.empty()) {
        if (o.format == "csv" || o.format == "both") std::fputs(csv.c_str(), stdout);
        if (o.format == "json" || o.format == "both")
            std::fprintf(stdout, "%s\n", doc.dump(2).c_str());
        return;
    }

    std::string stem = subcommand;
    for (char& ch : stem)
        if (ch == '-') ch = '_';
    const std::filesystem::path dir(o.out_dir);
    std::filesystem::create_directories(dir);

    json outputs = json::array();
    auto write_file = [&](const std::filesystem::path& path, const std::string& data) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        f.close();
        outputs.push_back(json{{"path", path.filename().string()},
                               {"bytes", data.size()},
                               {"fnv1a64", perc::hex64(perc::fnv1a64(data))}});
    };
    if (o.format == "csv" || o.format == "both")
        write_file(dir / (stem + ".csv"), csv);
    if (o.format == "json" || o.format == "both")
        write_file(dir / (stem + ".json"), doc.dump(2) + "\n");

    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["arguments"] = argv_echo;
    manifest["master_seed"] = master_seed;
    manifest["version"] = perc::version_string;
    manifest["started_utc"] = started;
    manifest["finished_utc"] = iso_utc_now();
    manifest["outputs"] = outputs;
    std::ofstream mf(dir / (stem + "_manifest.json"), std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write manifest");
    mf << manifest.dump(2) << "\n";

    std::fputs(csv.c_str(), stdout);  // keep the table visible in the terminal
}

perc::ExperimentSpec build_spec(perc::ExperimentKind kind, const CommonOpts& o,
                                double fallback_p) {
    perc::ExperimentSpec spec;
    spec.kind = kind;
    spec.n_values = o.n;
    spec.p_values = resolve_p(o, fallback_p);
    spec.replicas = o.replicas;
    spec.master_seed = resolve_seed(o.seed_text);
    spec.aspect = o.aspect;
    spec.threads = o.threads;
    spec.condition_on_origin_open = o.condition_origin_open;
    return spec;
}

int run_estimator(const std::string& subcommand, const CommonOpts& o,
                  const std::vector<std::string>& argv_echo) {
    const std::string started = iso_utc_now();
    perc::ExperimentKind kind = perc::ExperimentKind::CrossingProb;
    double fallback_p = 0.5;
    if (subcommand == "pivotal") {
        kind = perc::ExperimentKind::ConditionalPivotal;
    } else if (subcommand == "one-arm") {
        kind = perc::ExperimentKind::OneArm;
    } else if (subcommand == "cluster-tail") {
        kind = perc::ExperimentKind::ClusterTail;
        fallback_p = 0.4;
    } else if (subcommand == "rsw") {
        kind = perc::ExperimentKind::RswAspect;
    } else if (subcommand == "pc-locate") {
        kind = perc::ExperimentKind::PcLocate;
    }

    const perc::ExperimentSpec spec = build_spec(kind, o, fallback_p);

    if (kind == perc::ExperimentKind::ConditionalPivotal)
        for (const double p : spec.p_values)
            if (p > 0.5)
                std::fprintf(stderr,
                             "warning: pivotal growth statement assumes p <= 0.5 "
                             "(got %g)\n",
                             p);
    if (kind == perc::ExperimentKind::ClusterTail)
        for (const double p : spec.p_values)
            if (p >= 0.5)
                std::fprintf(stderr,
                             "warning: exponential decay of the radius tail needs "
                             "p < 0.5 (got %g)\n",
                             p);

    std::vector<perc::EstimateRecord> records;
    json doc;
    switch (kind) {
        case perc::ExperimentKind::CrossingProb:
            records = perc::estimate_crossing_probability(spec);
            break;
        case perc::ExperimentKind::ConditionalPivotal:
            records = perc::estimate_conditional_pivotal(spec);
            break;
        case perc::ExperimentKind::OneArm:
            records = perc::estimate_one_arm(spec);
            break;
        case perc::ExperimentKind::ClusterTail:
            records = perc::estimate_cluster_tail(spec);
            break;
        case perc::ExperimentKind::RswAspect:
            records = perc::rsw_aspect_check(spec);
            break;
        case perc::ExperimentKind::PcLocate: {
            perc::PcLocateResult pc = perc::locate_pc(spec);
            records = pc.p_star;
            json curve = json::array();
            for (const perc::EstimateRecord& rec : pc.curve) {
                curve.push_back(record_json(rec));
                records.push_back(rec);  // curve rows follow the p* rows in CSV
            }
            doc["curve"] = curve;
            json stars = json::array();
            for (const perc::EstimateRecord& rec : pc.p_star)
                stars.push_back(record_json(rec));
            doc["p_star"] = stars;
            break;
        }
    }

    json rows = json::array();
    for (const perc::EstimateRecord& rec : records) rows.push_back(record_json(rec));
    doc["records"] = rows;
    emit(subcommand, o, argv_echo, spec.master_seed, started,
         perc::csv_table(records), std::move(doc));
    return 0;
}

struct VerifyOpts {
    int max_sites = 16;
    std::int64_t random_trials = 100000;
    std::string seed_text = "default";
    std::string out_dir;
    std::string format = "json";
};

struct CheckRow {
    std::string region;
    std::string event;
    double p = std::numeric_limits<double>::quiet_NaN();
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

std::string region_label(int n) {
    return "[0," + std::to_string(n) + "]^2";
}

int run_oracle_verify(const VerifyOpts& vo, const std::vector<std::string>& argv_echo) {
    const std::string started = iso_utc_now();
    const std::uint64_t master_seed = resolve_seed(vo.seed_text);
    std::vector<CheckRow> checks;

    std::vector<int> exhaustive_n;
    for (int n = 0; (n + 1) * (n + 1) <= vo.max_sites; ++n) exhaustive_n.push_back(n);
    if (exhaustive_n.empty())
        throw std::domain_error("oracle-verify: --max-sites admits no region");

    // Duality, exhaustively: exactly one of open-LR / closed-TB holds.
    for (const int n : exhaustive_n) {
        const perc::Region r = perc::Region::square(n);
        const std::int64_t sites = r.site_count();
        std::int64_t good = 0;
        const std::int64_t total = std::int64_t{1} << sites;
        for (std::uint64_t mask = 0; mask < static_cast<std::uint64_t>(total); ++mask) {
            const perc::Configuration c = perc::Configuration::from_mask(r, mask);
            const bool lr = perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::LeftRight, perc::Color::Open});
            const bool tb_star = perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::TopBottom, perc::Color::Closed});
            if (lr != tb_star) ++good;
        }
        checks.push_back(CheckRow{region_label(n), "duality_exhaustive",
                                  std::numeric_limits<double>::quiet_NaN(),
                                  static_cast<double>(good),
                                  static_cast<double>(total), good == total});
    }

    // Duality on random configurations of a larger square.
    {
        const int n = 32;
        const perc::Region r = perc::Region::square(n);
        std::int64_t good = 0;
        for (std::int64_t trial = 0; trial < vo.random_trials; ++trial) {
            const perc::Configuration c = perc::Configuration::sample(
                r, 0.5, perc::stream_seed(master_seed, static_cast<std::uint64_t>(trial)));
            const bool lr = perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::LeftRight, perc::Color::Open});
            const bool tb_star = perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::TopBottom, perc::Color::Closed});
            if (lr != tb_star) ++good;
        }
        checks.push_back(CheckRow{region_label(n), "duality_random", 0.5,
                                  static_cast<double>(good),
                                  static_cast<double>(vo.random_trials),
                                  good == vo.random_trials});
    }

    // Differentiation identity: d/dp P_p(LR) against the exact expected
    // pivotal count.
    for (const int n : exhaustive_n) {
        const perc::Region r = perc::Region::square(n);
        for (const double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const perc::RussoReport rep = perc::verify_russo(r, p, 1e-9);
            checks.push_back(CheckRow{region_label(n), "russo", p, rep.lhs, rep.rhs,
                                      rep.pass});
        }
    }

    // Critical self-duality of the square: P at 1/2 is exactly one half.
    for (const int n : exhaustive_n) {
        const perc::Region r = perc::Region::square(n);
        const perc::EventPolynomial poly =
            perc::event_polynomial(r, [&](const perc::Configuration& c) {
                return perc::has_crossing(
                    c, perc::CrossingQuery{r, perc::Direction::LeftRight,
                                           perc::Color::Open});
            });
        const double value = poly.eval(0.5);
        checks.push_back(CheckRow{region_label(n), "critical_symmetry", 0.5, value, 0.5,
                                  std::fabs(value - 0.5) <= 1e-12});
    }

    // Positive correlation of two increasing events (open LR and open TB).
    for (const int n : exhaustive_n) {
        const perc::Region r = perc::Region::square(n);
        auto lr_event = [&](const perc::Configuration& c) {
            return perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::LeftRight, perc::Color::Open});
        };
        auto tb_event = [&](const perc::Configuration& c) {
            return perc::has_crossing(
                c, perc::CrossingQuery{r, perc::Direction::TopBottom, perc::Color::Open});
        };
        for (const double p : {0.3, 0.5, 0.7}) {
            const bool pass = perc::verify_fkg(r, p, lr_event, tb_event);
            checks.push_back(CheckRow{region_label(n), "fkg_lr_tb", p,
                                      pass ? 1.0 : 0.0, 1.0, pass});
        }
    }

    // Walk-based lowest crossing against the path-enumeration reference, on
    // regions small enough for the path table.
    for (const int n : exhaustive_n) {
        if (n > 3) continue;
        const perc::Region r = perc::Region::square(n);
        const perc::detail::LrPathTable table(r);
        const std::int64_t sites = r.site_count();
        std::int64_t crossing_configs = 0, agreements = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sites); ++mask) {
            const auto best = table.minimal(static_cast<std::uint32_t>(mask));
            const perc::Configuration c = perc::Configuration::from_mask(r, mask);
            const auto walked = perc::lowest_crossing(c);
            if (!best != !walked) continue;  // disagreement on existence
            if (!best) continue;             // nothing crosses; nothing to compare
            ++crossing_configs;
            std::uint32_t walked_mask = 0;
            for (const perc::Site& v : walked->path)
                walked_mask |= std::uint32_t{1} << r.index(v);
            if (walked_mask == best->sites) ++agreements;
        }
        checks.push_back(CheckRow{region_label(n), "minimal_below_crossing",
                                  std::numeric_limits<double>::quiet_NaN(),
                                  static_cast<double>(agreements),
                                  static_cast<double>(crossing_configs),
                                  agreements == crossing_configs});
    }

    std::int64_t failures = 0;
    json rows = json::array();
    std::string csv = "region,event,p,lhs,rhs,pass\n";
    for (const CheckRow& row : checks) {
        if (!row.pass) ++failures;
        json j;
        j["region"] = row.region;
        j["event"] = row.event;
        if (std::isnan(row.p))
            j["p"] = nullptr;
        else
            j["p"] = row.p;
        j["lhs"] = row.lhs;
        j["rhs"] = row.rhs;
        j["pass"] = row.pass;
        rows.push_back(j);
        csv += row.region + ',' + row.event + ',';
        if (!std::isnan(row.p)) csv += perc::format_g17(row.p);
        csv += ',' + perc::format_g17(row.lhs) + ',' + perc::format_g17(row.rhs) + ',' +
               (row.pass ? "true" : "false") + '\n';
        if (!row.pass)
            std::fprintf(stderr, "FAIL %s %s lhs=%.17g rhs=%.17g\n", row.event.c_str(),
                         row.region.c_str(), row.lhs, row.rhs);
    }

    json doc;
    doc["checks"] = rows;
    doc["passed"] = failures == 0;
    doc["failures"] = failures;

    CommonOpts emit_opts;
    emit_opts.out_dir = vo.out_dir;
    emit_opts.format = vo.format;
    emit("oracle-verify", emit_opts, argv_echo, master_seed, started, csv,
         std::move(doc));
    std::fprintf(stdout, "oracle-verify: %zu checks, %lld failures\n", checks.size(),
                 static_cast<long long>(failures));
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"site percolation laboratory on the triangular lattice"};
    app.require_subcommand(1);

    CommonOpts crossing, pivotal, one_arm, cluster_tail, rsw, pc;
    rsw.aspect = 2;
    VerifyOpts verify;

    CLI::App* sub_crossing =
        app.add_subcommand("crossing-prob", "open left-right crossing probability");
    add_common(sub_crossing, crossing, true);
    CLI::App* sub_pivotal = app.add_subcommand(
        "pivotal", "pivotal-site count conditioned on the crossing");
    add_common(sub_pivotal, pivotal, false);
    CLI::App* sub_one_arm =
        app.add_subcommand("one-arm", "origin cluster reaching the box boundary");
    add_common(sub_one_arm, one_arm, false);
    sub_one_arm->add_flag("--condition-origin-open", one_arm.condition_origin_open,
                          "condition on the origin being open");
    CLI::App* sub_tail =
        app.add_subcommand("cluster-tail", "radius tail of the origin cluster");
    add_common(sub_tail, cluster_tail, false);
    sub_tail->add_flag("--condition-origin-open", cluster_tail.condition_origin_open,
                       "condition on the origin being open");
    CLI::App* sub_rsw =
        app.add_subcommand("rsw", "crossing probability of long rectangles");
    add_common(sub_rsw, rsw, true);
    CLI::App* sub_pc = app.add_subcommand("pc-locate", "threshold location from "
                                                       "crossing-probability curves");
    add_common(sub_pc, pc, false);

    CLI::App* sub_verify =
        app.add_subcommand("oracle-verify", "exact small-region referee suites");
    sub_verify->add_option("--max-sites", verify.max_sites,
                           "largest exhaustively enumerated site count")
        ->check(CLI::Range(1, 25));
    sub_verify->add_option("--random-trials", verify.random_trials,
                           "randomized duality trials at n=32")
        ->check(CLI::NonNegativeNumber);
    sub_verify->add_option("--seed", verify.seed_text,
                           "master seed: unsigned integer, or 'random'");
    sub_verify->add_option("--out", verify.out_dir,
                           "directory for output files + manifest");
    sub_verify->add_option("--format", verify.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::vector<std::string> argv_echo(argv + 1, argv + argc);
    try {
        if (sub_verify->parsed()) return run_oracle_verify(verify, argv_echo);
        if (sub_crossing->parsed())
            return run_estimator("crossing-prob", crossing, argv_echo);
        if (sub_pivotal->parsed()) return run_estimator("pivotal", pivotal, argv_echo);
        if (sub_one_arm->parsed()) return run_estimator("one-arm", one_arm, argv_echo);
        if (sub_tail->parsed())
            return run_estimator("cluster-tail", cluster_tail, argv_echo);
        if (sub_rsw->parsed()) return run_estimator("rsw", rsw, argv_echo);
        if (sub_pc->parsed()) return run_estimator("pc-locate", pc, argv_echo);
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
