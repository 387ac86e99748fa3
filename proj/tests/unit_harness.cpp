#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gradsec/error.hpp"
#include "gradsec/harness.hpp"
#include "json.hpp"

using namespace gradsec;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    std::filesystem::path p = std::filesystem::path("/tmp") / ("gradsec_harness_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("presets are all constructible and valid") {
    for (const std::string& name : preset_names()) {
        ExperimentConfig cfg = make_preset(name);
        CHECK(cfg.name == name);
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK_THROWS_AS(make_preset("no-such-preset"), Error);
}

TEST_CASE("config json round-trips exactly") {
    for (const std::string& name : preset_names()) {
        ExperimentConfig cfg = make_preset(name);
        std::string first = cfg.to_json_text();
        ExperimentConfig back = ExperimentConfig::from_json_text(first);
        CHECK(back.to_json_text() == first);
    }
}

TEST_CASE("unknown and malformed config keys are rejected") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"modle\": \"tiny\"}"), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"train\": {\"momentum\": 0.9}}"), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("[1, 2]"), Error);
    CHECK_NOTHROW(ExperimentConfig::from_json_text("{\"model\": \"tiny\"}"));
}

TEST_CASE("config validation rejects contradictory setups") {
    ExperimentConfig cfg = make_preset("dria-tiny-none");

    SUBCASE("bad model name") {
        cfg.model = "resnet";
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("reconstruction needs a single example") {
        cfg.samples = 4;
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("bad policy syntax") {
        cfg.policy = "bogus:1";
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("bad activation") {
        cfg.activation = "gelu";
        CHECK_THROWS_AS(cfg.validate(), Error);
    }
    SUBCASE("membership needs rows for every client") {
        ExperimentConfig mia = make_preset("mia-lenet5-none");
        mia.attack.members = 1;
        CHECK_THROWS_AS(mia.validate(), Error);
    }
    SUBCASE("property runs need the planted property") {
        ExperimentConfig dpia = make_preset("dpia-synth-none");
        dpia.synth.with_property = false;
        CHECK_THROWS_AS(dpia.validate(), Error);
    }
}

TEST_CASE("a run writes its artifacts and is byte-deterministic") {
    ExperimentConfig cfg = make_preset("dria-tiny-none");
    std::filesystem::path out1 = fresh_dir("det1");
    std::filesystem::path out2 = fresh_dir("det2");
    cfg.seed = 3;

    cfg.out_dir = out1.string();
    RunReport r1 = run_experiment(cfg);
    cfg.out_dir = out2.string();
    RunReport r2 = run_experiment(cfg);

    std::filesystem::path d1 = r1.run_dir, d2 = r2.run_dir;
    CHECK(std::filesystem::exists(d1 / "metrics.csv"));
    CHECK(std::filesystem::exists(d1 / "outcome.json"));
    CHECK(std::filesystem::exists(d1 / "meta.json"));
    CHECK(std::filesystem::exists(d1 / "snapshots" / "cycle_0.bin"));
    CHECK(std::filesystem::exists(d1 / "traces" / "cycle_0_client_0.trace"));

    CHECK(slurp(d1 / "metrics.csv") == slurp(d2 / "metrics.csv"));
    // outcome files agree except for the embedded artifact location
    nlohmann::json o1 = nlohmann::json::parse(slurp(d1 / "outcome.json"));
    nlohmann::json o2 = nlohmann::json::parse(slurp(d2 / "outcome.json"));
    o1.erase("artifact");
    o2.erase("artifact");
    CHECK(o1 == o2);
    CHECK(r1.outcome.value == r2.outcome.value);

    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

TEST_CASE("metrics rows carry footprint and policy columns") {
    ExperimentConfig cfg = make_preset("dria-tiny-first2");
    std::filesystem::path out = fresh_dir("metrics");
    cfg.out_dir = out.string();
    RunReport r = run_experiment(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].protected_layers == "1|2");
    CHECK(r.rows[0].footprint_bytes > 0);

    std::string csv = slurp(std::filesystem::path(r.run_dir) / "metrics.csv");
    CHECK(csv.find("cycle,protected_layers,window_location,footprint_bytes,mean_loss") == 0);
    CHECK(csv.find("1|2") != std::string::npos);
    std::filesystem::remove_all(out);
}

TEST_CASE("sweep covers every policy seed pair") {
    ExperimentConfig cfg = make_preset("dria-tiny-none");
    std::filesystem::path out = fresh_dir("sweep");
    SweepResult res = sweep_layers(cfg, "static_single", 2, out.string());
    CHECK(res.axis == "static_single");
    CHECK(res.points.size() == 6);  // 3 layers x 2 seeds
    for (const SweepPoint& p : res.points) CHECK(p.status == "ok");
    CHECK(std::filesystem::exists(res.table_path));
    CHECK(std::filesystem::exists(res.summary_path));

    std::string table = slurp(res.table_path);
    CHECK(table.find("policy,seed,status,metric,value") == 0);
    CHECK_THROWS_AS(sweep_layers(cfg, "bogus_axis", 1, out.string()), Error);
    std::filesystem::remove_all(out);
}

TEST_CASE("thread pool size respects config then environment") {
    CHECK(effective_threads(3) == 3);
    ::setenv("GRADSEC_THREADS", "2", 1);
    CHECK(effective_threads(0) == 2);
    ::setenv("GRADSEC_THREADS", "0", 1);
    CHECK(effective_threads(0) >= 1);
    ::unsetenv("GRADSEC_THREADS");
    CHECK(effective_threads(0) >= 1);
}
