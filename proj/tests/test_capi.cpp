#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "regsum/capi.h"

namespace {

struct Ctx {
    regsum_ctx* p = nullptr;
    Ctx(uint64_t limit = 0, int threads = 0) {
        REQUIRE(regsum_ctx_new(limit, threads, &p) == REGSUM_OK);
        REQUIRE(p != nullptr);
    }
    ~Ctx() { regsum_ctx_free(p); }
};

nlohmann::json run(regsum_ctx* ctx, const std::string& cfg, regsum_status want) {
    char* out = nullptr;
    regsum_status st = regsum_run_json(ctx, cfg.c_str(), &out);
    CHECK(st == want);
    nlohmann::json j;
    if (out) {
        j = nlohmann::json::parse(out, nullptr, false);
        CHECK_FALSE(j.is_discarded());
        regsum_buf_free(out);
    }
    return j;
}

}  // namespace

TEST_CASE("context lifecycle") {
    Ctx ctx;
    regsum_ctx_free(nullptr);
    regsum_buf_free(nullptr);
    CHECK(regsum_ctx_new(100, 1, nullptr) == REGSUM_ERR_CONFIG);
    for (int s = 0; s <= 5; ++s)
        CHECK(regsum_status_str(static_cast<regsum_status>(s)) != nullptr);
    CHECK(std::string(regsum_status_str(REGSUM_OK)) == "ok");
}

TEST_CASE("arithmetic kernels") {
    Ctx ctx;
    uint64_t out = 0;
    CHECK(regsum_rho(ctx.p, 12, &out) == REGSUM_OK);
    CHECK(out == 9);
    CHECK(regsum_pillai_regular(ctx.p, 12, &out) == REGSUM_OK);
    CHECK(out == 30);

    int reg = -1;
    CHECK(regsum_is_regular(3, 4, &reg) == REGSUM_OK);
    CHECK(reg == 1);
    CHECK(regsum_is_regular(4, 4, &reg) == REGSUM_OK);
    CHECK(reg == 1);
    CHECK(regsum_is_regular(2, 4, &reg) == REGSUM_OK);
    CHECK(reg == 0);
    CHECK(regsum_is_regular(6, 12, &reg) == REGSUM_OK);
    CHECK(reg == 0);

    CHECK(regsum_rho(ctx.p, 0, &out) == REGSUM_ERR_DOMAIN);
    CHECK(regsum_last_error(ctx.p) != nullptr);
    CHECK(regsum_rho(ctx.p, 12, nullptr) == REGSUM_ERR_CONFIG);
    CHECK(regsum_is_regular(1, 0, &reg) == REGSUM_ERR_DOMAIN);
}

TEST_CASE("run_json: verify round trip") {
    Ctx ctx;
    auto j = run(ctx.p,
                 R"({"command":"verify","kind":"power","f":"id","nmax":80,"r":2,"threads":2})",
                 REGSUM_OK);
    CHECK(j["exit_code"] == 0);
    CHECK(j["data"]["ok"] == true);
    CHECK(j["data"]["checked"] == 80);

    auto b = run(ctx.p,
                 R"({"command":"verify","kind":"bernoulli","f":"phi","nmax":60,"m":2,"threads":2})",
                 REGSUM_OK);
    CHECK(b["data"]["ok"] == true);
}

TEST_CASE("run_json: constants") {
    Ctx ctx(150000, 4);
    auto j = run(ctx.p, R"({"command":"constants"})", REGSUM_OK);
    CHECK(j["exit_code"] == 0);
    bool saw = false;
    for (const auto& row : j["data"]["constants"])
        if (row["name"] == "K1") {
            saw = true;
            CHECK(std::string(row["value"]).substr(0, 6) == "0.7044");
        }
    CHECK(saw);
}

TEST_CASE("run_json: error paths") {
    Ctx ctx;
    CHECK(regsum_run_json(ctx.p, nullptr, nullptr) == REGSUM_ERR_CONFIG);

    char* out = nullptr;
    CHECK(regsum_run_json(ctx.p, "{broken", &out) == REGSUM_ERR_CONFIG);
    CHECK(out == nullptr);
    CHECK(std::strlen(regsum_last_error(ctx.p)) > 0);

    auto j = run(ctx.p, R"({"command":"wat"})", REGSUM_ERR_CONFIG);
    auto k = run(ctx.p,
                 R"({"command":"sweep","eq":"eq2","f":"mu","checkpoints":[100]})",
                 REGSUM_ERR_CONFIG);
    if (!k.is_null() && k.contains("summary"))
        CHECK(std::string(k["summary"]).find("config") != std::string::npos);
}

TEST_CASE("run_json: sweep uses context defaults") {
    Ctx ctx(50000, 2);
    auto j = run(ctx.p,
                 R"({"command":"sweep","eq":"eq1","f":"tau","r":1,"checkpoints":[50,400],)"
                 R"("accum":"exact","output_dir":"/tmp/regsum_capi_sweep"})",
                 REGSUM_OK);
    CHECK(j["exit_code"] == 0);
    REQUIRE(j["data"]["rows"].size() == 2);
    CHECK(j["data"]["rows"][1]["x"] == 400);
    CHECK(j["data"]["rows"][1].contains("lhs_exact"));
}
