#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "rtcycle/config.hpp"

using namespace rtcycle;

TEST_CASE("config serialization round trips through the parser") {
    EngineConfig cfg;
    cfg.eta_compressor = 0.87;
    cfg.coolant_flow_kg_s = 25.5;
    cfg.sink_enforce = true;
    cfg.envelope.tit_K = {1350.0, 1700.0};
    cfg.train.epochs = 123;
    cfg.keq_table_path = "some/table.dat";

    const std::string text = serialize_config(cfg);
    EngineConfig back;
    std::istringstream in(text);
    apply_config_stream(in, back);
    CHECK(serialize_config(back) == text);
    CHECK(back.eta_compressor == 0.87);
    CHECK(back.sink_enforce == true);
    CHECK(back.envelope.tit_K.hi == 1700.0);
    CHECK(back.train.epochs == 123);
    CHECK(back.keq_table_path == "some/table.dat");
}

TEST_CASE("config files accept comments and reject unknown keys") {
    EngineConfig cfg;
    std::istringstream good("# comment\n  engine.eta_compressor = 0.9  # trailing\n\n");
    apply_config_stream(good, cfg);
    CHECK(cfg.eta_compressor == 0.9);

    std::istringstream bad("engine.eta_compresor = 0.9\n");
    EngineConfig scratch;
    try {
        apply_config_stream(bad, scratch);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("unknown config key") != std::string::npos);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }

    std::istringstream malformed("just words\n");
    CHECK_THROWS_AS(apply_config_stream(malformed, scratch), parse_error);
    std::istringstream badnum("engine.eta_compressor = fast\n");
    CHECK_THROWS_AS(apply_config_stream(badnum, scratch), parse_error);
}

TEST_CASE("invalid values fail validation") {
    EngineConfig cfg;
    std::istringstream over("engine.eta_compressor = 1.5\n");
    CHECK_THROWS_AS(apply_config_stream(over, cfg), domain_error);

    EngineConfig cfg2;
    std::istringstream lr("train.learning_rate = 0\n");
    CHECK_THROWS_AS(apply_config_stream(lr, cfg2), domain_error);
}

TEST_CASE("the sample configuration in the repository matches the defaults") {
    const EngineConfig from_file =
        load_config(std::string(RTCYCLE_SOURCE_DIR) + "/configs/default.cfg");
    CHECK(serialize_config(from_file) == serialize_config(EngineConfig{}));
}

TEST_CASE("config hash is stable and sensitive") {
    const EngineConfig a;
    EngineConfig b;
    b.eta_turbine1 = 0.91;
    CHECK(fnv1a_hash(serialize_config(a)) == fnv1a_hash(serialize_config(a)));
    CHECK(fnv1a_hash(serialize_config(a)) != fnv1a_hash(serialize_config(b)));
}

TEST_CASE("nitrogen heat ratio follows the configured vapour cp") {
    EngineConfig cfg;
    CHECK(cfg.n2_heat_ratio() > 1.0);
    CHECK(cfg.n2_heat_ratio() < 1.45);
    cfg.n2_cp_kJ_kgK = 1.2;
    CHECK(cfg.n2_heat_ratio() < 1.4);
}
