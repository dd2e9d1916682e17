#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "qpencil");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("qpencil_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

// Draft-07 subset used by the shipped schemas.
void validate(const json& v, const json& s, const std::string& where, std::vector<std::string>& errors) {
    auto fail = [&](const std::string& what) { errors.push_back(where + ": " + what); };
    if (s.contains("oneOf")) {
        int hits = 0;
        for (const auto& alt : s["oneOf"]) {
            std::vector<std::string> sub;
            validate(v, alt, where, sub);
            hits += sub.empty();
        }
        if (hits != 1) fail("matches " + std::to_string(hits) + " oneOf branches");
        return;
    }
    if (s.contains("const") && v != s["const"]) fail("expected " + s["const"].dump());
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end()) fail("not in enum");
    if (s.contains("type")) {
        const std::string t = s["type"];
        bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) || (t == "string" && v.is_string()) ||
                  (t == "boolean" && v.is_boolean()) || (t == "null" && v.is_null()) ||
                  (t == "integer" && v.is_number_integer()) || (t == "number" && v.is_number());
        if (!ok) {
            fail("expected type " + t + ", got " + v.dump());
            return;
        }
    }
    if (v.is_string()) {
        const std::string str = v;
        if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>()) fail("too short");
        if (s.contains("pattern") && !std::regex_search(str, std::regex(s["pattern"].get<std::string>()))) fail("pattern mismatch: " + str);
    }
    if (v.is_number() && s.contains("minimum") && v.get<double>() < s["minimum"].get<double>()) fail("below minimum");
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail("too few items");
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) fail("too many items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], where + "[" + std::to_string(i) + "]", errors);
    }
    if (v.is_object()) {
        if (s.contains("required"))
            for (const auto& k : s["required"])
                if (!v.contains(k.get<std::string>())) fail("missing " + k.get<std::string>());
        for (const auto& [k, val] : v.items()) {
            if (s.contains("properties") && s["properties"].contains(k))
                validate(val, s["properties"][k], where + "." + k, errors);
            else if (s.value("additionalProperties", true) == false)
                fail("unexpected key " + k);
        }
    }
}

std::vector<std::string> check_schema(const std::string& report, const std::string& text) {
    std::ifstream in(std::string(SCHEMA_DIR) + "/" + report + ".schema.json");
    REQUIRE(in);
    json schema = json::parse(in);
    std::vector<std::string> errors;
    validate(json::parse(text), schema, report, errors);
    return errors;
}

const std::string kStable = "g=2 q=7 a=0 b=0\nlambda: 0, 1, 2, 3, 4\nflags: 1:0, 0:1, 1:1, 2:1, 5:1\n";
const std::string kUnstable = "g=2 q=7 a=0 b=0\nlambda: 0, 1, 2, 3, 4\nflags: 1:0, 1:0, 1:0, 2:1, 5:1\n";
const std::string kAllEqual = "g=2 q=7 a=0 b=0\nlambda: 0, 1, 2, 3, 4\nflags: 1:2, 1:2, 1:2, 1:2, 1:2\n";
const std::string kSplit = "g=2 q=7 a=2 b=-2\nlambda: 0, 1, 2, 3, 4\nflags: 1:0, 0:1, 1:1, 2:1, 5:1\n";
const std::string kCounts = "# g = 3 line counts\n7 6672\n17 131632\n19 196176\n23 393232\n29 927856\n";

}  // namespace

TEST_CASE("pencil") {
    Result r = call({"pencil", "--q", "7", "--lambda", "0,1,2,3,4", "--deterministic"});
    CHECK(r.code == 0);
    CHECK(r.out.find("smooth: true") != std::string::npos);
    CHECK(r.err.empty());

    Result rep = call({"pencil", "--q", "7", "--lambda", "0,1,1,3,4", "--deterministic"});
    CHECK(rep.code == 0);
    CHECK(rep.out.find("smooth: false") != std::string::npos);

    Result missing = call({"pencil", "--q", "7"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--lambda") != std::string::npos);

    CHECK(call({"pencil", "--q", "8", "--lambda", "0,1,2"}).code == 2);
    CHECK(call({"pencil", "--q", "7", "--lambda", "0,1,x"}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
}

TEST_CASE("subspaces") {
    Result r = call({"subspaces", "--q", "5", "--lambda", "0,1,2,3,4", "--dim", "1", "--deterministic"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("r=1 N=4 q=5\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 17);
    Result rational = call({"subspaces", "--q", "Q", "--lambda", "0,1,2,3,4", "--dim", "0"});
    CHECK(rational.code == 2);
    CHECK(call({"subspaces", "--q", "5", "--lambda", "0,1,2,3,4", "--dim", "4"}).code == 2);
    Result singular = call({"subspaces", "--q", "5", "--lambda", "0,1,1,3,4", "--dim", "0", "--deterministic"});
    CHECK(singular.code == 2);
}

TEST_CASE("stability exit codes and witnesses") {
    Result s = call({"stability", "--bundle-file", write_file("stable.txt", kStable), "--deterministic"});
    CHECK(s.code == 0);
    Result u = call({"stability", "--bundle-file", write_file("equal.txt", kAllEqual), "--deterministic", "--format", "json"});
    CHECK(u.code == 1);
    json j = json::parse(u.out);
    CHECK(j["stable"] == false);
    CHECK(j["witness"]["coincidences"] == json::array({1, 2, 3, 4, 5}));
    CHECK(j["witness"]["degree"] == 0);
    Result split = call({"stability", "--bundle-file", write_file("split.txt", kSplit), "--deterministic"});
    CHECK(split.code == 1);

    Result bad = call({"stability", "--bundle-file", write_file("bad.txt", "g=2 q=7 a=0 b=0\nlambda: 0, 1, 2, 3, 4\nflags: 1;0, 0:1, 1:1, 2:1, 5:1\n")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("1;0") != std::string::npos);
    CHECK(call({"stability", "--bundle-file", (scratch() / "absent.txt").string()}).code == 2);
    CHECK(call({"stability"}).code == 2);
}

TEST_CASE("transform") {
    std::string file = write_file("t.txt", kStable);
    Result once = call({"transform", "--bundle-file", file, "--deterministic"});
    CHECK(once.code == 0);
    CHECK(once.out.find("a=-2 b=-3") != std::string::npos);
    Result twice = call({"transform", "--bundle-file", file, "--twice", "--deterministic"});
    CHECK(twice.code == 0);
    CHECK(twice.out.find("# round trip: pass") != std::string::npos);
    Result bad = call({"transform", "--bundle-file", write_file("tbad.txt", "g=2 q=7 a=0 b=0\nlambda: 0, 1, 2, 3, 4\nflags: 1:0\n")});
    CHECK(bad.code == 2);
}

TEST_CASE("census") {
    Result ok = call({"census", "--g", "2", "--q", "5", "--lambda", "0,1,2,3,4", "--deterministic", "--format", "json"});
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out)["match"] == true);
    Result mismatch = call({"census", "--g", "2", "--q", "7", "--lambda", "0,1,2,3,4", "--deterministic", "--format", "csv"});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.out.find("g,q,lambda") == 0);
    CHECK(call({"census", "--g", "2", "--q", "Q", "--lambda", "0,1,2,3,4"}).code == 2);
    CHECK(call({"census", "--g", "2", "--q", "7", "--lambda", "0,1,2,3"}).code == 2);
    CHECK(call({"census", "--g", "2", "--q", "7", "--lambda", "0,1,2,3,3"}).code == 2);
}

TEST_CASE("verlinde and betti") {
    Result v = call({"verlinde", "3", "--deterministic"});
    CHECK(v.code == 0);
    CHECK(v.out == "21\n");
    CHECK(call({"verlinde", "--g", "2", "--deterministic"}).out == "5\n");
    CHECK(call({"verlinde", "0"}).code == 2);
    CHECK(call({"verlinde", "x"}).code == 2);

    Result b = call({"betti", "--counts-file", write_file("counts.txt", kCounts), "--dim", "4", "--deterministic", "--format", "json"});
    CHECK(b.code == 0);
    CHECK(json::parse(b.out)["coefficients"] == json::array({"1", "8", "30", "8", "1"}));
    Result shortfile = call({"betti", "--counts-file", write_file("short.txt", "7 6672\n17 131632\n"), "--dim", "4"});
    CHECK(shortfile.code == 2);
    Result garbage = call({"betti", "--counts-file", write_file("garbage.txt", "7 many\n"), "--dim", "0"});
    CHECK(garbage.code == 2);
}

TEST_CASE("search") {
    Result r = call({"search", "--g", "2", "--q", "11", "--deterministic", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["fully_split"] == 4);
    CHECK(call({"search", "--g", "2", "--q", "7", "--deterministic"}).code == 1);
}

TEST_CASE("every JSON report validates against its schema") {
    std::string stable = write_file("s1.txt", kStable), unstable = write_file("s2.txt", kUnstable);
    std::string counts = write_file("c1.txt", kCounts);
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"pencil", {"pencil", "--q", "7", "--lambda", "0,1,2,3,4"}},
        {"pencil", {"pencil", "--q", "Q", "--lambda", "0,1/2,2,3,4", "--lambda-extra", "7"}},
        {"subspaces", {"subspaces", "--q", "5", "--lambda", "0,1,2,3,4", "--dim", "1"}},
        {"subspaces", {"subspaces", "--q", "7", "--lambda", "0,1,2,3,4", "--lambda-extra", "5", "--dim", "0"}},
        {"stability", {"stability", "--bundle-file", stable}},
        {"stability", {"stability", "--bundle-file", unstable}},
        {"transform", {"transform", "--bundle-file", stable}},
        {"transform", {"transform", "--bundle-file", stable, "--twice"}},
        {"census", {"census", "--g", "2", "--q", "5", "--lambda", "0,1,2,3,4"}},
        {"census", {"census", "--g", "2", "--q", "7", "--lambda", "0,1,2,3,4"}},
        {"verlinde", {"verlinde", "7"}},
        {"betti", {"betti", "--counts-file", counts, "--dim", "4"}},
        {"search", {"search", "--g", "2", "--q", "11"}},
    };
    for (auto [report, args] : runs) {
        args.insert(args.end(), {"--format", "json", "--deterministic"});
        Result r = call(args);
        CAPTURE(args[0]);
        REQUIRE(r.code != 2);
        json j = json::parse(r.out);
        CHECK(j["schema_version"] == "1.0");
        CHECK(j["report"] == report);
        auto errors = check_schema(report, r.out);
        for (const auto& e : errors) MESSAGE(e);
        CHECK(errors.empty());
    }
}

TEST_CASE("the validator rejects malformed reports") {
    CHECK(!check_schema("verlinde", R"({"schema_version":"1.0","report":"verlinde","g":3,"value":21})").empty());
    CHECK(!check_schema("verlinde", R"({"schema_version":"1.0","report":"verlinde","g":3})").empty());
    CHECK(!check_schema("verlinde", R"({"schema_version":"1.0","report":"verlinde","g":3,"value":"21","extra":1})").empty());
    CHECK(!check_schema("stability", R"({"schema_version":"1.0","report":"stability","bundle":"x","stable":true,"witness":null})").empty());
}

TEST_CASE("config file and precedence") {
    std::string cfg = write_file("run.cfg", "# census defaults\ng = 2\nq = 7\nlambda = 0,1,2,3,4\nformat = json\ndeterministic = true\n");
    Result from_file = call({"census", "--config", cfg});
    CHECK(from_file.code == 1);
    CHECK(json::parse(from_file.out)["q"] == 7);
    CHECK(from_file.err.empty());
    Result overridden = call({"census", "--config", cfg, "--q", "5"});
    CHECK(overridden.code == 0);
    CHECK(json::parse(overridden.out)["q"] == 5);
    Result fmt = call({"census", "--config", cfg, "--q", "5", "--format", "csv"});
    CHECK(fmt.out.rfind("g,q,lambda", 0) == 0);
    CHECK(call({"census", "--config", (scratch() / "nope.cfg").string()}).code == 2);
}

TEST_CASE("deterministic output and --out") {
    const std::vector<std::vector<std::string>> cmds = {
        {"census", "--g", "2", "--q", "11", "--lambda", "0,1,2,4,7", "--format", "json"},
        {"subspaces", "--q", "11", "--lambda", "0,1,2,4,7", "--dim", "1", "--format", "json"},
        {"search", "--g", "2", "--q", "11", "--format", "csv"},
    };
    for (auto args : cmds) {
        args.push_back("--deterministic");
        auto a = args, b = args;
        a.insert(a.end(), {"--workers", "1"});
        b.insert(b.end(), {"--workers", "8"});
        Result r1 = call(a), r2 = call(a), r8 = call(b);
        CHECK(r1.out == r2.out);
        CHECK(r1.out == r8.out);
        CHECK(r1.err.empty());
    }
    Result timed = call({"verlinde", "2"});
    CHECK(timed.err.find("elapsed") != std::string::npos);
    CHECK(timed.out == "5\n");

    std::string path = (scratch() / "report.json").string();
    Result to_file = call({"verlinde", "4", "--format", "json", "--deterministic", "--out", path});
    CHECK(to_file.out.empty());
    std::ifstream in(path);
    CHECK(json::parse(in)["value"] == "85");
}
