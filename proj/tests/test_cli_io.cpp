#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "regwatch/config.hpp"
#include "regwatch/run.hpp"
#include "regwatch/snapshot_io.hpp"
#include "regwatch/solver.hpp"
#include "test_helpers.hpp"

using namespace regwatch;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p =
        fs::temp_directory_path() / ("regwatch_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void flip_byte(const fs::path& p, std::size_t offset) {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(bool(f));
    f.seekg(std::streamoff(offset));
    char c = 0;
    f.get(c);
    f.seekp(std::streamoff(offset));
    f.put(char(c ^ 0x40));
}

std::map<std::string, std::string> parse_summary(const fs::path& p) {
    std::map<std::string, std::string> out;
    std::ifstream in(p);
    REQUIRE(bool(in));
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

template <class E, class Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    }
    FAIL("expected exception was not thrown");
    return {};
}

RunConfig match_config() {
    RunConfig cfg;
    cfg.solver.n = 8;
    cfg.solver.dt = 1e-3;
    cfg.solver.end_time = 0.02;
    cfg.solver.nu = 1.0;
    cfg.solver.snapshot_stride = 10;
    cfg.solver.diagnostic_stride = 10;
    cfg.solver.tail_energy_limit = 1.0; // coarse grid: the initial shell sits at the band edge
    cfg.solver.betas = {1.0, 1.5};
    cfg.solver.initial.kind = InitialCondition::Kind::random_divfree;
    cfg.solver.initial.seed = 11;
    cfg.solver.initial.amplitude = 0.25;

    CriterionSpec full;
    full.kind = CriterionKind::kappa_beta;
    full.parameter = 1.0;
    full.gamma = 6.0;
    full.alpha = 4.0;
    cfg.solver.criteria.push_back(full);

    CriterionSpec cyl;
    cyl.kind = CriterionKind::kappa;
    cyl.gamma = 3.0;
    cyl.alpha = inf_exponent;
    cyl.region = Region::cylinder({SpectralGrid::pi, SpectralGrid::pi, SpectralGrid::pi},
                                  0.02, 1.0);
    cfg.solver.criteria.push_back(cyl);
    return cfg;
}

// One stored run of match_config, shared across cases.
const fs::path& match_bundle() {
    static const fs::path dir = [] {
        const fs::path d = fresh_dir("match_bundle");
        RunConfig cfg = match_config();
        cfg.output_directory = d.string();
        run_simulate(cfg);
        return d;
    }();
    return dir;
}

RunConfig abc_config(double end_time, int snapshot_stride, int diagnostic_stride) {
    RunConfig cfg;
    cfg.solver.n = 8;
    cfg.solver.dt = 1e-3;
    cfg.solver.end_time = end_time;
    cfg.solver.nu = 1.0;
    cfg.solver.snapshot_stride = snapshot_stride;
    cfg.solver.diagnostic_stride = diagnostic_stride;
    cfg.solver.betas = {1.0};
    cfg.solver.initial.kind = InitialCondition::Kind::abc;

    CriterionSpec kb;
    kb.kind = CriterionKind::kappa_beta;
    kb.parameter = 1.0;
    kb.gamma = 6.0;
    kb.alpha = 4.0;
    cfg.solver.criteria.push_back(kb);

    CriterionSpec k;
    k.kind = CriterionKind::kappa;
    k.gamma = 3.0;
    k.alpha = inf_exponent;
    cfg.solver.criteria.push_back(k);
    return cfg;
}

bool relatively_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("config text round-trips through parse and write") {
    RunConfig c;
    c.solver.n = 16;
    c.solver.dt = 2e-3;
    c.solver.end_time = 0.75;
    c.solver.nu = 0.05;
    c.solver.cfl_limit = 0.4;
    c.solver.snapshot_stride = 25;
    c.solver.diagnostic_stride = 5;
    c.solver.max_velocity_guard = 500.0;
    c.solver.tail_energy_limit = 1e-5;
    c.solver.betas = {1.0, 1.75};
    c.solver.initial.kind = InitialCondition::Kind::random_divfree;
    c.solver.initial.A = 0.5;
    c.solver.initial.slope = -2.25;
    c.solver.initial.seed = 99;
    c.solver.initial.amplitude = 0.3;

    CriterionSpec s1;
    s1.kind = CriterionKind::kappa_beta;
    s1.parameter = 1.5;
    s1.gamma = 6.0;
    s1.alpha = 4.0;
    c.solver.criteria.push_back(s1);

    CriterionSpec s2;
    s2.kind = CriterionKind::weighted_kappa;
    s2.parameter = 0.5;
    s2.gamma = inf_exponent;
    s2.alpha = inf_exponent;
    s2.direction_floor = 1e-11;
    s2.region = Region::cylinder({1.0, 2.0, 3.0}, 0.5, 0.4);
    c.solver.criteria.push_back(s2);

    c.output_directory = "elsewhere";
    c.verify.checks = {"balance", "young"};
    c.verify.beta = 1.5;
    c.verify.gamma = 4.0;
    c.verify.constant = 2.5;
    c.verify.interpolation_constant = 3.0;
    c.verify.epsilon = 0.05;
    c.verify.tolerance_scale = 2.0;

    const std::string text = write_config_text(c);
    const RunConfig p = parse_config_text(text);
    CHECK(write_config_text(p) == text);

    CHECK(p.solver.n == 16);
    CHECK(p.solver.dt == 2e-3);
    CHECK(p.solver.betas == std::vector<double>{1.0, 1.75});
    CHECK(p.solver.initial.kind == InitialCondition::Kind::random_divfree);
    CHECK(p.solver.initial.seed == 99);
    REQUIRE(p.solver.criteria.size() == 2);
    CHECK(p.solver.criteria[0].kind == CriterionKind::kappa_beta);
    CHECK(p.solver.criteria[0].parameter == 1.5);
    CHECK(p.solver.criteria[1].kind == CriterionKind::weighted_kappa);
    CHECK(std::isinf(p.solver.criteria[1].gamma));
    CHECK(p.solver.criteria[1].region.kind == Region::Kind::cylinder);
    CHECK(p.solver.criteria[1].region.top_time == 0.5);
    CHECK(p.solver.criteria[1].region.radius == 0.4);
    CHECK(p.output_directory == "elsewhere");
    CHECK(p.verify.checks == std::vector<std::string>{"balance", "young"});
    CHECK(p.verify.beta == 1.5);
    CHECK(p.verify.tolerance_scale == 2.0);
}

TEST_CASE("config parser reads comments, spacing, and inf exponents") {
    const std::string text =
        "# full run description\n"
        "[solver]\n"
        "  n = 12   # resolution\n"
        "dt=5e-4\n"
        "betas = 1.0, 2.0\n"
        "\n"
        "[initial]\n"
        "kind = taylor_green\n"
        "\n"
        "[criterion]\n"
        "kind = eta\n"
        "gamma = inf\n"
        "alpha = inf\n"
        "\n"
        "[output]\n"
        "directory = some/dir\n";
    const RunConfig p = parse_config_text(text);
    CHECK(p.solver.n == 12);
    CHECK(p.solver.dt == 5e-4);
    CHECK(p.solver.betas == std::vector<double>{1.0, 2.0});
    CHECK(p.solver.initial.kind == InitialCondition::Kind::taylor_green);
    REQUIRE(p.solver.criteria.size() == 1);
    CHECK(p.solver.criteria[0].kind == CriterionKind::eta);
    CHECK(std::isinf(p.solver.criteria[0].gamma));
    CHECK(std::isinf(p.solver.criteria[0].alpha));
    CHECK(p.output_directory == "some/dir");
    CHECK(p.verify.checks.empty());

    // stable canonical form even when the input leaves everything defaulted
    const std::string canon = write_config_text(p);
    CHECK(write_config_text(parse_config_text(canon)) == canon);
}

TEST_CASE("config errors name the offending line") {
    auto msg = [](const std::string& text) {
        return thrown_message<ConfigError>([&] { (void)parse_config_text(text); });
    };

    CHECK(msg("[solver]\nn = 7\n").find("config line 2") != std::string::npos);
    CHECK(msg("[solver]\nn = 7\n").find("even") != std::string::npos);
    CHECK(msg("[mystery]\n").find("config line 1") != std::string::npos);
    CHECK(msg("[solver]\nwidgets = 3\n").find("unknown key 'widgets'") != std::string::npos);
    CHECK(msg("[solver]\nn 16\n").find("expected 'key = value'") != std::string::npos);
    CHECK(msg("n = 16\n").find("outside any section") != std::string::npos);
    CHECK(msg("[solver]\ndt = fast\n").find("cannot parse") != std::string::npos);
    CHECK(msg("[solver]\ndt = nan\n").find("config line 2") != std::string::npos);
    CHECK(msg("[solver]\ndt = -1e-3\n").find("positive") != std::string::npos);
    CHECK(msg("[solver]\nn = 16.5\n").find("integer") != std::string::npos);
    CHECK(msg("[solver]\nbetas = 0.5\n").find("[1, 2]") != std::string::npos);
    CHECK(msg("[solver]\nbetas = ,\n").find("empty list") != std::string::npos);
    CHECK(msg("[initial]\nkind = vortex\n").find("config line 2") != std::string::npos);
    CHECK(msg("[criterion]\nkind = enstrophy\n").find("config line 2") != std::string::npos);
    CHECK(msg("[criterion]\ncenter = 1.0, 2.0\n").find("three coordinates") !=
          std::string::npos);
    CHECK(msg("[verify]\nchecks = balance, entropy\n").find("unknown check 'entropy'") !=
          std::string::npos);
    CHECK(msg("[verify]\ntolerance_scale = 0\n").find("positive") != std::string::npos);
    CHECK(msg("[criterion]\nregion = sphere\n").find("'full' or 'cylinder'") !=
          std::string::npos);

    // cylinder assembly failures point at the section header line
    const std::string bad_radius =
        "[criterion]\n"
        "kind = kappa\n"
        "region = cylinder\n"
        "center = 1, 1, 1\n"
        "top_time = 0.5\n"
        "radius = 3.5\n";
    CHECK(msg(bad_radius).find("config line 1") != std::string::npos);
    const std::string no_radius =
        "[solver]\nn = 16\n"
        "[criterion]\n"
        "kind = kappa\n"
        "region = cylinder\n"
        "top_time = 0.5\n";
    CHECK(msg(no_radius).find("config line 3") != std::string::npos);
}

TEST_CASE("cylinder criterion parses the same in any key order") {
    const std::string head =
        "[solver]\nn = 16\n"
        "[criterion]\n";
    const std::string a = head +
                          "kind = kappa\n"
                          "region = cylinder\n"
                          "center = 1.5, 2.5, 3.0\n"
                          "top_time = 0.25\n"
                          "radius = 0.5\n";
    const std::string b = head +
                          "radius = 0.5\n"
                          "top_time = 0.25\n"
                          "center = 1.5, 2.5, 3.0\n"
                          "kind = kappa\n"
                          "region = cylinder\n";
    CHECK(write_config_text(parse_config_text(a)) == write_config_text(parse_config_text(b)));
}

TEST_CASE("config file save and load") {
    const fs::path dir = fresh_dir("cfg_file");
    RunConfig c;
    c.solver.n = 10;
    c.output_directory = (dir / "out").string();
    const fs::path file = dir / "run.cfg";
    save_config(c, file.string());
    const RunConfig p = load_config(file.string());
    CHECK(write_config_text(p) == write_config_text(c));
    CHECK_THROWS_AS((void)load_config((dir / "absent.cfg").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("snapshot files round-trip bit for bit") {
    const fs::path dir = fresh_dir("snap_rt");
    SpectralGrid grid(8);
    std::mt19937_64 rng(2024);
    VectorField v = testing::random_vector(grid, rng);

    const fs::path file = dir / "snapshot_000000.rgw";
    write_snapshot(file, 0.1234567890123456, v);
    const LoadedSnapshot back = read_snapshot(file);
    CHECK(back.time == 0.1234567890123456);
    CHECK(back.velocity.grid().n() == 8);
    CHECK(testing::max_abs_diff(back.velocity, v) == 0.0);

    // header: 4 magic + 4 n + 8 time, then 3 * n^3 doubles
    CHECK(fs::file_size(file) == 16 + 3 * 8 * 512);
    fs::remove_all(dir);
}

TEST_CASE("snapshot reader rejects damaged files") {
    const fs::path dir = fresh_dir("snap_bad");
    SpectralGrid grid(8);
    std::mt19937_64 rng(7);
    VectorField v = testing::random_vector(grid, rng);
    const fs::path file = dir / "snap.rgw";
    write_snapshot(file, 0.5, v);

    CHECK_THROWS_AS((void)read_snapshot(dir / "missing.rgw"), IoError);

    flip_byte(file, 0); // magic
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);
    flip_byte(file, 0);
    CHECK_NOTHROW((void)read_snapshot(file));

    fs::resize_file(file, fs::file_size(file) - 9); // truncate into the last component
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);

    write_snapshot(file, 0.5, v);
    {
        std::ofstream app(file, std::ios::binary | std::ios::app);
        app.put('\0');
    }
    CHECK_THROWS_AS((void)read_snapshot(file), IoError);
    fs::remove_all(dir);
}

TEST_CASE("checksums match the published test vectors") {
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);

    const fs::path dir = fresh_dir("fnv_file");
    const fs::path file = dir / "payload.bin";
    std::string payload(200000, '\0'); // spans multiple read chunks
    for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = char(i * 31 + 7);
    std::ofstream(file, std::ios::binary).write(payload.data(), std::streamsize(payload.size()));
    CHECK(fnv1a64_file(file) == fnv1a64(payload.data(), payload.size()));
    fs::remove_all(dir);
}

TEST_CASE("manifest detects any altered artifact") {
    const fs::path dir = fresh_dir("manifest");
    std::ofstream(dir / "b.txt") << "second";
    std::ofstream(dir / "a.txt") << "first";
    write_manifest(dir, {"b.txt", "a.txt"});

    const std::vector<ManifestEntry> entries = read_manifest(dir);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].name == "a.txt"); // sorted regardless of insertion order
    CHECK(entries[1].name == "b.txt");
    CHECK(entries[0].size == 5);
    CHECK_NOTHROW(check_manifest(dir));

    std::ofstream(dir / "unrelated.log") << "not tracked";
    CHECK_NOTHROW(check_manifest(dir));

    flip_byte(dir / "a.txt", 2);
    CHECK_THROWS_AS(check_manifest(dir), IoError);
    flip_byte(dir / "a.txt", 2);
    CHECK_NOTHROW(check_manifest(dir));

    std::ofstream(dir / "b.txt", std::ios::app) << "!";
    CHECK_THROWS_AS(check_manifest(dir), IoError);

    fs::remove(dir / "a.txt");
    CHECK_THROWS_AS(check_manifest(dir), IoError);

    CHECK_THROWS_AS(read_manifest(fresh_dir("manifest_empty")), IoError);
    fs::remove_all(dir);
}

TEST_CASE("directory lock is exclusive and released on destruction") {
    const fs::path dir = fresh_dir("lock");
    {
        DirectoryLock lock(dir);
        CHECK_THROWS_AS(DirectoryLock{dir}, IoError);
    }
    CHECK_NOTHROW(DirectoryLock{dir});
    fs::remove_all(dir);
}

TEST_CASE("simulate run writes a complete, checked bundle") {
    const fs::path& dir = match_bundle();

    CHECK(fs::exists(dir / "diagnostics.csv"));
    CHECK(fs::exists(dir / "run_config.cfg"));
    CHECK(fs::exists(dir / "manifest.txt"));
    // 20 steps, snapshot every 10: samples at steps 0, 10, 20
    CHECK(fs::exists(dir / "snapshot_000000.rgw"));
    CHECK(fs::exists(dir / "snapshot_000002.rgw"));
    CHECK(!fs::exists(dir / "snapshot_000003.rgw"));
    CHECK_NOTHROW(check_manifest(dir));
    CHECK(!fs::exists(dir / ".regwatch.lock")); // released after the run

    // the stored config reproduces the effective one
    RunConfig cfg = match_config();
    cfg.output_directory = dir.string();
    CHECK(slurp(dir / "run_config.cfg") == write_config_text(cfg));

    const std::string header = slurp(dir / "diagnostics.csv").substr(0, 200);
    CHECK(header.find("t,E_1,E_1.5,D_1,D_1.5,T_1,T_1.5,") == 0);
    CHECK(header.find("c0_kappa_beta_g6") != std::string::npos);
    CHECK(header.find("c1_kappa_g3_cyl") != std::string::npos);
}

TEST_CASE("simulate runs are deterministic under a fixed seed") {
    // the stored config echoes the (differing) output path, so compare
    // everything else: snapshots and diagnostics must be bit-identical
    auto data_manifest = [](const fs::path& dir) {
        std::istringstream in(slurp(dir / "manifest.txt"));
        std::string line, out;
        while (std::getline(in, line))
            if (line.find("run_config.cfg") == std::string::npos) out += line + "\n";
        return out;
    };

    const fs::path dir2 = fresh_dir("det_second");
    RunConfig cfg = match_config();
    cfg.output_directory = dir2.string();
    run_simulate(cfg);
    CHECK(data_manifest(dir2) == data_manifest(match_bundle()));
    CHECK(slurp(dir2 / "diagnostics.csv") == slurp(match_bundle() / "diagnostics.csv"));

    RunConfig other = match_config();
    other.solver.initial.seed = 12; // a different seed must diverge
    const fs::path dir3 = fresh_dir("det_other_seed");
    other.output_directory = dir3.string();
    run_simulate(other);
    CHECK(data_manifest(dir3) != data_manifest(match_bundle()));

    fs::remove_all(dir2);
    fs::remove_all(dir3);
}

TEST_CASE("simulate refuses a directory locked by another writer") {
    const fs::path dir = fresh_dir("locked_out");
    DirectoryLock lock(dir);
    RunConfig cfg = match_config();
    cfg.output_directory = dir.string();
    CHECK_THROWS_AS(run_simulate(cfg), IoError);
}

TEST_CASE("reloaded trajectories reproduce the live diagnostics") {
    RunConfig cfg = match_config();
    const Trajectory live = simulate(cfg.solver);
    const Trajectory back = load_trajectory(cfg, match_bundle());

    REQUIRE(back.snapshots.size() == live.snapshots.size());
    REQUIRE(back.diagnostics.size() == live.diagnostics.size()); // equal strides in match_config
    CHECK(back.nu == live.nu);
    CHECK(back.betas == live.betas);

    for (std::size_t i = 0; i < back.snapshots.size(); ++i) {
        CHECK(back.snapshots[i].time == live.snapshots[i].time);
        CHECK(testing::max_abs_diff(back.snapshots[i].velocity, live.snapshots[i].velocity) ==
              0.0);
    }
    for (std::size_t i = 0; i < back.diagnostics.size(); ++i) {
        const DiagnosticSample& a = live.diagnostics[i];
        const DiagnosticSample& b = back.diagnostics[i];
        CHECK(b.time == a.time);
        for (std::size_t j = 0; j < a.energy.size(); ++j) {
            CHECK(relatively_close(b.energy[j], a.energy[j], 1e-12));
            CHECK(relatively_close(b.dissipation[j], a.dissipation[j], 1e-12));
            CHECK(relatively_close(b.production[j], a.production[j], 1e-10));
        }
        for (std::size_t j = 0; j < a.criterion_norms.size(); ++j)
            CHECK(relatively_close(b.criterion_norms[j], a.criterion_norms[j], 1e-10));
    }
}

TEST_CASE("diagnose writes reproducible criterion series and aggregates") {
    RunConfig cfg = match_config();
    const fs::path d1 = fresh_dir("diag_one");
    cfg.output_directory = d1.string();
    run_diagnose(cfg, match_bundle());

    CHECK_NOTHROW(check_manifest(d1));
    const std::string csv = slurp(d1 / "criteria.csv");
    CHECK(csv.substr(0, csv.find('\n')) == "t,c0_kappa_beta_g6,c1_kappa_g3_cyl");

    const std::map<std::string, std::string> summary = parse_summary(d1 / "summary.txt");
    CHECK(summary.at("samples") == "3");
    CHECK(summary.at("n") == "8");
    CHECK(summary.at("t_begin") == "0");
    CHECK(summary.at("c0_kappa_beta_g6.alpha") == "4");
    CHECK(summary.count("c1_kappa_g3_cyl.mask_points") == 1);
    CHECK(summary.at("c1_kappa_g3_cyl.window_clipped") == "1"); // r^2 = 1 > sampled 0.02
    CHECK(summary.at("c1_kappa_g3_cyl.window_begin") == "0");

    const fs::path d2 = fresh_dir("diag_two");
    cfg.output_directory = d2.string();
    run_diagnose(cfg, match_bundle());
    CHECK(slurp(d2 / "criteria.csv") == csv);
    CHECK(slurp(d2 / "summary.txt") == slurp(d1 / "summary.txt"));

    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("diagnose of a single snapshot reduces to the spatial norm") {
    const fs::path dir = fresh_dir("diag_single");
    SpectralGrid grid(8);
    VectorField v(grid);
    testing::fill_from(v[0], [](double, double y, double) { return std::sin(y); });
    testing::fill_from(v[1], [](double, double, double z) { return std::sin(z); });
    testing::fill_from(v[2], [](double x, double, double) { return std::sin(x); });
    write_snapshot(dir / "snapshot_000000.rgw", 0.25, v);
    write_manifest(dir, {"snapshot_000000.rgw"});

    RunConfig cfg;
    CriterionSpec sup;
    sup.kind = CriterionKind::kappa;
    sup.gamma = 3.0;
    sup.alpha = inf_exponent;
    cfg.solver.criteria.push_back(sup);
    CriterionSpec integral = sup;
    integral.alpha = 4.0;
    cfg.solver.criteria.push_back(integral);

    const fs::path out = fresh_dir("diag_single_out");
    cfg.output_directory = out.string();
    run_diagnose(cfg, dir);

    const std::map<std::string, std::string> summary = parse_summary(out / "summary.txt");
    CHECK(summary.at("samples") == "1");
    // sup over one sample is that sample; a zero-length time integral is zero
    CHECK(summary.at("c0_kappa_g3.mixed_norm") == summary.at("c0_kappa_g3.spatial_max"));
    CHECK(summary.at("c1_kappa_g3.mixed_norm") == "0");
    CHECK(summary.at("c0_kappa_g3.spatial_max") != "0");

    fs::remove_all(dir);
    fs::remove_all(out);
}

TEST_CASE("diagnose rejects unusable snapshot directories") {
    RunConfig cfg = match_config();
    cfg.output_directory = fresh_dir("diag_err_out").string();

    // corruption caught by the manifest before any analysis
    const fs::path dir = fresh_dir("diag_corrupt");
    RunConfig sim = match_config();
    sim.output_directory = dir.string();
    run_simulate(sim);
    flip_byte(dir / "snapshot_000001.rgw", 40);
    CHECK_THROWS_AS(run_diagnose(cfg, dir), IoError);
    fs::remove_all(dir);

    // manifest present but no snapshots listed or stored
    const fs::path empty = fresh_dir("diag_empty");
    std::ofstream(empty / "note.txt") << "x";
    write_manifest(empty, {"note.txt"});
    CHECK_THROWS_AS(run_diagnose(cfg, empty), IoError);
    fs::remove_all(empty);

    // times must strictly increase
    const fs::path stale = fresh_dir("diag_stale");
    SpectralGrid grid(8);
    std::mt19937_64 rng(3);
    VectorField v = testing::random_vector(grid, rng);
    write_snapshot(stale / "snapshot_000000.rgw", 0.1, v);
    write_snapshot(stale / "snapshot_000001.rgw", 0.1, v);
    write_manifest(stale, {"snapshot_000000.rgw", "snapshot_000001.rgw"});
    CHECK_THROWS_AS(run_diagnose(cfg, stale), IoError);
    fs::remove_all(stale);

    // grids must agree
    const fs::path mixed = fresh_dir("diag_mixed");
    write_snapshot(mixed / "snapshot_000000.rgw", 0.0, v);
    SpectralGrid big(16);
    VectorField w(big);
    write_snapshot(mixed / "snapshot_000001.rgw", 0.1, w);
    write_manifest(mixed, {"snapshot_000000.rgw", "snapshot_000001.rgw"});
    CHECK_THROWS_AS(run_diagnose(cfg, mixed), IoError);
    fs::remove_all(mixed);

    // a criterion list is required, and cylinder windows must overlap the data
    RunConfig bare = match_config();
    bare.solver.criteria.clear();
    bare.output_directory = cfg.output_directory;
    CHECK_THROWS_AS(run_diagnose(bare, match_bundle()), ConfigError);

    RunConfig outside = match_config();
    outside.solver.criteria[1].region = Region::cylinder({1.0, 1.0, 1.0}, 5.0, 0.9);
    outside.output_directory = cfg.output_directory;
    CHECK_THROWS_AS(run_diagnose(outside, match_bundle()), ConfigError);

    // a ball smaller than the lattice spacing holds no points at all
    RunConfig hollow = match_config();
    hollow.solver.criteria[1].region = Region::cylinder({1.0, 1.0, 1.0}, 0.02, 0.3);
    hollow.output_directory = cfg.output_directory;
    CHECK_THROWS_AS(run_diagnose(hollow, match_bundle()), ConfigError);
    CHECK_THROWS_AS(run_simulate(hollow), ConfigError);
}

TEST_CASE("live verify runs every configured check and reports") {
    RunConfig cfg = abc_config(1.0, 100, 10);
    const fs::path out = fresh_dir("verify_live");
    cfg.output_directory = out.string();

    const VerifyOutcome outcome = run_verify(cfg);
    CHECK(outcome.all_passed);
    REQUIRE(outcome.results.size() == known_check_names().size());
    for (std::size_t i = 0; i < outcome.results.size(); ++i) {
        CAPTURE(outcome.results[i].name);
        CHECK(outcome.results[i].name == known_check_names()[i]);
        CHECK(outcome.results[i].passed);
    }

    const std::string report = slurp(out / "verify_report.txt");
    CHECK(report.find("balance: PASS") != std::string::npos);
    CHECK(report.find("local_energy: PASS") != std::string::npos);
    CHECK(report.find("result = PASS") != std::string::npos);
    CHECK_NOTHROW(check_manifest(out));
    fs::remove_all(out);
}

TEST_CASE("snapshot-mode verify works at adequate sampling density") {
    RunConfig cfg = abc_config(0.05, 10, 10);
    const fs::path bundle = fresh_dir("verify_snap_bundle");
    cfg.output_directory = bundle.string();
    run_simulate(cfg);

    RunConfig ver = cfg;
    ver.verify.checks = {"balance", "holder", "young", "interpolation", "gronwall",
                         "smallness"};
    const fs::path out = fresh_dir("verify_snap_out");
    ver.output_directory = out.string();
    const VerifyOutcome outcome = run_verify(ver, bundle);
    CHECK(outcome.all_passed);
    CHECK(outcome.results.size() == 6);

    // scaling the tolerances down turns an honest pass into an honest failure
    RunConfig tight = ver;
    tight.verify.checks = {"balance"};
    tight.verify.tolerance_scale = 1e-9;
    const fs::path out2 = fresh_dir("verify_snap_tight");
    tight.output_directory = out2.string();
    const VerifyOutcome failed = run_verify(tight, bundle);
    CHECK(!failed.all_passed);
    CHECK(!failed.results[0].passed);
    CHECK(slurp(out2 / "verify_report.txt").find("result = FAIL") != std::string::npos);

    fs::remove_all(bundle);
    fs::remove_all(out);
    fs::remove_all(out2);
}

TEST_CASE("verify refuses checks the sampling cannot support") {
    RunConfig cfg = abc_config(0.2, 100, 100);
    const fs::path bundle = fresh_dir("verify_sparse_bundle");
    cfg.output_directory = bundle.string();
    run_simulate(cfg);

    RunConfig ver = cfg;
    ver.verify.checks = {"balance"};
    ver.output_directory = fresh_dir("verify_sparse_out").string();
    CHECK_THROWS_AS((void)run_verify(ver, bundle), SparseSamplingError);

    // two snapshots cannot anchor the local energy quadrature either
    RunConfig le = abc_config(0.02, 20, 20);
    const fs::path thin = fresh_dir("verify_thin_bundle");
    le.output_directory = thin.string();
    run_simulate(le);
    RunConfig lv = le;
    lv.verify.checks = {"local_energy"};
    lv.output_directory = fresh_dir("verify_thin_out").string();
    CHECK_THROWS_AS((void)run_verify(lv, thin), SparseSamplingError);

    fs::remove_all(bundle);
    fs::remove_all(thin);
}

TEST_CASE("verify demands the series its checks consume") {
    RunConfig cfg = abc_config(0.05, 10, 10);
    cfg.solver.criteria.erase(cfg.solver.criteria.begin()); // drop the kappa_beta series
    const fs::path bundle = fresh_dir("verify_missing_bundle");
    cfg.output_directory = bundle.string();
    run_simulate(cfg);

    RunConfig ver = cfg;
    ver.verify.checks = {"young"};
    ver.output_directory = fresh_dir("verify_missing_out").string();
    CHECK_THROWS_AS((void)run_verify(ver, bundle), ConfigError);

    ver.verify.checks = {"gronwall"};
    CHECK_THROWS_AS((void)run_verify(ver, bundle), ConfigError);

    fs::remove_all(bundle);
}
