#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

// End-to-end runs of the installed binary; POLYPUZZLE_CLI_PATH comes from
// the build system.

namespace {

struct CliResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(POLYPUZZLE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), out};
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir =
        std::filesystem::temp_directory_path() / ("polypuzzle_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cycles classifies the basilica") {
    const CliResult r = run_cli("cycles --poly \"z^2-1\"");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "period 2  superattracting"));
    CHECK(contains(r.out, "(-0.6180339887498949, 0)"));
    CHECK(contains(r.out, "(1.618033988749895, 0)"));
    CHECK(!contains(r.out, "irrationally-neutral detected"));
}

TEST_CASE("cycles rejects a rational map with position info") {
    const CliResult r = run_cli("cycles --poly \"z^2+1/z\"");
    CHECK(r.code == 2);
    CHECK(contains(r.out, "not a polynomial"));
    CHECK(contains(r.out, "at position"));
}

TEST_CASE("the emitted neutral constant is refused by the gate") {
    const CliResult emitted = run_cli("cycles --emit-neutral-c");
    REQUIRE(emitted.code == 0);
    std::string c = emitted.out;
    while (!c.empty() && (c.back() == '\n' || c.back() == '\r')) c.pop_back();
    REQUIRE(!c.empty());

    const CliResult refused =
        run_cli("cycles --poly \"z^2" + c + "\"");
    CHECK(refused.code == 1);
    CHECK(contains(refused.out, "irrationally-neutral detected"));

    const CliResult shrink_refused = run_cli("shrink --poly \"z^2" + c +
                                             "\" --eps 0.4 --res 128 --max-iter 300");
    CHECK(shrink_refused.code == 1);
    CHECK(contains(shrink_refused.out, "irrationally-neutral detected"));
}

TEST_CASE("ray lands on the cut point and records a manifest") {
    const auto dir = fresh_dir("ray");
    const CliResult r =
        run_cli("ray --poly \"z^2-1\" --angle 1/3 --out " + dir.string());
    CHECK(r.code == 0);

    const auto ray = nlohmann::json::parse(slurp(dir / "ray_1_3.json"));
    CHECK(ray["angle"] == "1/3");
    CHECK(ray["points"].size() > 100);
    REQUIRE(ray["landing"].is_array());
    const double alpha = (1.0 - std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(ray["landing"][0].get<double>() - alpha) < 1e-8);
    CHECK(std::abs(ray["landing"][1].get<double>()) < 1e-8);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(contains(manifest["config_hash"].get<std::string>(), "fnv1a:"));
    CHECK(manifest["version"] == "0.1.0");
    CHECK(manifest["files"] == nlohmann::json::array({"ray_1_3.json"}));
}

TEST_CASE("potential emits the level curve in both formats") {
    const CliResult r = run_cli("potential --poly \"z^2-1\" --level 1.0");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "re,im\n"));
    CHECK(contains(r.out, "\"level\": 1.0"));
    CHECK(contains(r.out, "\"points\": ["));
}

TEST_CASE("render writes valid rasters and a manifest") {
    const auto dir = fresh_dir("render");
    const CliResult r = run_cli(
        "render --poly \"z^2-1\" --res 128x128 --max-iter 300 --out " + dir.string());
    CHECK(r.code == 0);

    const std::string pgm = slurp(dir / "escape.pgm");
    CHECK(pgm.rfind("P5\n128 128\n255\n", 0) == 0);
    CHECK(pgm.size() == 15 + 128 * 128);
    const std::string png = slurp(dir / "escape.png");
    CHECK(png.rfind("\x89PNG\r\n\x1a\n", 0) == 0);
    CHECK(contains(png, "IHDR"));
    CHECK(contains(png, "IDAT"));
    CHECK(std::filesystem::exists(dir / "basins.pgm"));
    CHECK(std::filesystem::exists(dir / "basins.png"));

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["files"].size() == 4);
}

TEST_CASE("components tabulates both component kinds") {
    const CliResult r =
        run_cli("components --poly \"z^2-1\" --res 128 --max-iter 300");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("id,kind,cycle,pixels,diameter,touches_boundary\n", 0) == 0);
    CHECK(contains(r.out, ",filled-julia,"));
    CHECK(contains(r.out, ",fatou,"));
}

TEST_CASE("components refuses a box missing the escape disk") {
    const CliResult r = run_cli(
        "components --poly \"z^2-1\" --res 128 --box 0,0,1,1 --max-iter 300");
    CHECK(r.code == 2);
    CHECK(contains(r.out, "box"));
}

TEST_CASE("shrink verdicts and outputs are deterministic") {
    const auto dir_a = fresh_dir("shrink_a");
    const std::string args =
        "shrink --poly \"z^2-1\" --eps 0.4,0.2 --res 128,192 --max-iter 300 --out ";
    const CliResult first = run_cli(args + dir_a.string());
    CHECK(first.code == 0);
    // Frozen verdicts at these toy resolutions: three large Fatou
    // components are resolution-stable, the 0.2 band is not yet.
    CHECK(contains(first.out, "epsilon 0.4: STABLE (count 3)"));
    CHECK(contains(first.out, "epsilon 0.2: UNSTABLE (counts 3, 5)"));
    CHECK(slurp(dir_a / "shrink_128.csv") == "epsilon,count\n0.4,3\n0.2,3\n");

    // Byte-identical rerun into another directory under a thread cap.
    const auto dir_b = fresh_dir("shrink_b");
    const std::string cap = "POLYPUZZLE_THREADS=1 ";
    const std::string cmd = cap + std::string(POLYPUZZLE_CLI_PATH) + " " + args +
                            dir_b.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    for (const char* name : {"shrink_128.csv", "shrink_192.csv", "manifest.json"})
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
}

TEST_CASE("an empty epsilon list is an empty table") {
    const auto dir = fresh_dir("shrink_empty");
    const CliResult r = run_cli(
        "shrink --poly \"z^2-1\" --eps \"\" --res 128 --max-iter 300 --out " +
        dir.string());
    CHECK(r.code == 0);
    CHECK(slurp(dir / "shrink_128.csv") == "epsilon,count\n");
    CHECK(!contains(r.out, "STABLE"));
}

TEST_CASE("puzzle pieces serialize with their boundary angles") {
    const CliResult listed = run_cli("puzzle --poly \"z^2-1\" --depth 1");
    CHECK(listed.code == 0);
    const auto pieces = nlohmann::json::parse(listed.out);
    REQUIRE(pieces.is_array());
    CHECK(pieces.size() == 3);
    for (const auto& piece : pieces) {
        CHECK(piece["depth"] == 1);
        CHECK(piece["angles"].size() > 0);
        CHECK(piece["polygon"].size() > 10);
        CHECK(piece.contains("vertices_on_julia"));
    }

    const auto dir = fresh_dir("puzzle");
    const CliResult written =
        run_cli("puzzle --poly \"z^2-1\" --depth 2 --out " + dir.string());
    CHECK(written.code == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["files"].size() == 5);
    CHECK(std::filesystem::exists(dir / "piece_2_4.json"));
}

TEST_CASE("verify passes clean and names injected corruption") {
    const CliResult clean = run_cli("verify --poly \"z^2-1\" --depth 3");
    CHECK(clean.code == 0);
    const std::size_t brace = clean.out.find('{');
    REQUIRE(brace != std::string::npos);
    const auto report = nlohmann::json::parse(clean.out.substr(brace));
    CHECK(report["pass"] == true);
    REQUIRE(report["checks"].size() == 5);
    for (const auto& check : report["checks"]) CHECK(check["pass"] == true);

    const CliResult corrupted =
        run_cli("verify --poly \"z^2-1\" --depth 3 --drop-angle 2/3");
    CHECK(corrupted.code == 3);
    CHECK(contains(corrupted.out, "verify failed: markov"));
    CHECK(contains(corrupted.out, "maps to 2/3 which is missing"));
}

TEST_CASE("flags override the config file which overrides defaults") {
    const auto dir = fresh_dir("config");
    const auto config_path = dir / "run.json";
    std::ofstream(config_path)
        << "{\"poly\": \"z^2-1\", \"depth\": 1, \"max_iter\": 300}";

    const CliResult from_file =
        run_cli("puzzle --config " + config_path.string());
    CHECK(from_file.code == 0);
    CHECK(nlohmann::json::parse(from_file.out).size() == 3);

    const CliResult overridden =
        run_cli("puzzle --config " + config_path.string() + " --depth 2");
    CHECK(overridden.code == 0);
    CHECK(nlohmann::json::parse(overridden.out).size() == 5);
}

TEST_CASE("malformed or unknown config input is a usage error") {
    const auto dir = fresh_dir("config_bad");
    const auto broken = dir / "broken.json";
    std::ofstream(broken) << "{ nope";
    const CliResult parse_fail = run_cli("cycles --config " + broken.string());
    CHECK(parse_fail.code == 2);
    CHECK(contains(parse_fail.out, "config parse"));

    const auto unknown = dir / "unknown.json";
    std::ofstream(unknown) << "{\"polynomial\": \"z^2-1\"}";
    const CliResult key_fail = run_cli("cycles --config " + unknown.string());
    CHECK(key_fail.code == 2);
    CHECK(contains(key_fail.out, "unknown config key: polynomial"));
}
