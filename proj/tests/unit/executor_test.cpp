#include <doctest.h>

#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pipegen/executor/clock.hpp"
#include "pipegen/executor/event_log.hpp"
#include "pipegen/executor/retry.hpp"
#include "pipegen/executor/step_runner.hpp"
#include "pipegen/providers/mock_backend.hpp"

using namespace pipegen;
using namespace pipegen::exec;
using providers::ErrorKind;
using providers::MockReply;

namespace {

struct Harness {
    std::shared_ptr<providers::MockBackend> mock;
    providers::BackendRegistry registry;
    providers::ModelPool pool;
    VirtualClock clock;
    EventLog log{&clock};
    RetryHandler handler;

    Harness(std::vector<MockReply> script, std::size_t models = 1, std::shared_ptr<RandomSource> rng = nullptr,
            bool auto_reply = false)
        : mock(std::make_shared<providers::MockBackend>(std::move(script), auto_reply)),
          pool(make_models(models)),
          handler(pool, registry, make_policy(std::move(rng)), clock, &log) {
        registry.add("mock", mock);
    }

    static std::vector<providers::ModelHandle> make_models(std::size_t n) {
        std::vector<providers::ModelHandle> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(providers::parse_model_spec("mock:m" + std::to_string(i), providers::ModelRole::primary));
        }
        return out;
    }
    static RetryPolicy make_policy(std::shared_ptr<RandomSource> rng) {
        RetryPolicy p;
        if (rng) p.rng = std::move(rng);
        return p;
    }
};

providers::ChatRequest req(std::string task = "t") { return {std::move(task), "", "hello"}; }

}  // namespace

TEST_SUITE("executor") {

TEST_CASE("backoff delay examples") {
    CHECK(backoff_delay(0, 0.5, Millis(1000)).count() == doctest::Approx(1000.0));
    CHECK(backoff_delay(2, 0.25, Millis(1000)).count() == doctest::Approx(3000.0));
    CHECK(backoff_delay(3, 0.0, Millis(100)).count() == doctest::Approx(400.0));
}

TEST_CASE("backoff draws follow the seeded generator exactly") {
    RetryPolicy policy;
    policy.rng = std::make_shared<SeededRandom>(1234);
    std::mt19937_64 ref(1234);
    for (int k = 0; k <= 4; ++k) {
        double r = static_cast<double>(ref() >> 11) * 0x1.0p-53;
        double expect = 1000.0 * std::ldexp(1.0, k) * (0.5 + r);
        CHECK(backoff_delay(k, policy).count() == expect);
    }
}

TEST_CASE("backoff stays in [0.5, 1.5) times the doubled base") {
    auto rng = std::make_shared<SeededRandom>(99);
    RetryPolicy policy;
    policy.rng = rng;
    for (int i = 0; i < 10000; ++i) {
        int k = i % 6;
        double d = backoff_delay(k, policy).count();
        double base = 1000.0 * std::ldexp(1.0, k);
        CHECK(d >= 0.5 * base);
        CHECK(d < 1.5 * base);
    }
}

TEST_CASE("fixed sequences cycle and reject out-of-range values") {
    FixedSequence seq({0.1, 0.9});
    CHECK(seq.next() == 0.1);
    CHECK(seq.next() == 0.9);
    CHECK(seq.next() == 0.1);
    CHECK_THROWS(FixedSequence({1.0}));
    CHECK_THROWS(FixedSequence({}));
}

TEST_CASE("policy validation") {
    RetryPolicy p;
    CHECK_NOTHROW(p.validate());
    p.max_retries = 0;
    CHECK_THROWS(p.validate());
    RetryPolicy q;
    q.base_delay = Millis(-1);
    CHECK_THROWS(q.validate());
    RetryPolicy r;
    r.rng = nullptr;
    CHECK_THROWS(r.validate());
}

TEST_CASE("virtual clock records sleeps without blocking") {
    VirtualClock c;
    auto t0 = c.now();
    c.sleep_for(Millis(1500));
    c.advance(Millis(500));
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(c.now() - t0).count() == 2000);
    REQUIRE(c.sleeps().size() == 1);
    CHECK(c.sleeps()[0].count() == 1500.0);
    CHECK(format_utc(t0) == "2024-01-01T00:00:00.000Z");
}

TEST_CASE("one rate limit then success sleeps once") {
    Harness h({MockReply::fail(ErrorKind::rate_limit), MockReply::ok("fine")}, 1,
              std::make_shared<FixedSequence>(std::vector<double>{0.5}));
    auto out = h.handler.call(req(), {}, "s");
    REQUIRE(out.response);
    CHECK(out.response->content == "fine");
    CHECK(out.attempts == 2);
    REQUIRE(h.clock.sleeps().size() == 1);
    CHECK(h.clock.sleeps()[0].count() == doctest::Approx(1000.0));
    auto sleeps = h.log.events_of("sleep");
    REQUIRE(sleeps.size() == 1);
    CHECK(sleeps[0]["r"] == 0.5);
    CHECK(sleeps[0]["retries"] == 0);
}

TEST_CASE("quota errors rotate without sleeping") {
    Harness h({MockReply::fail(ErrorKind::quota_exceeded), MockReply::fail(ErrorKind::quota_exceeded),
               MockReply::ok("third")},
              3);
    auto out = h.handler.call(req());
    REQUIRE(out.response);
    CHECK(h.pool.current_index() == 2);
    CHECK(out.model_used == "mock/m2");
    CHECK(h.clock.sleeps().empty());
    CHECK(h.log.events_of("rotate").size() == 2);
}

TEST_CASE("five rate limits exhaust the budget") {
    std::vector<MockReply> script(5, MockReply::fail(ErrorKind::rate_limit));
    Harness h(script);
    auto out = h.handler.call(req());
    CHECK_FALSE(out.response);
    CHECK(out.attempts == 5);
    CHECK(out.last_error == ErrorKind::rate_limit);
    CHECK(h.clock.sleeps().size() == 5);
    CHECK(h.mock->calls() == 5);
}

TEST_CASE("five quota errors fall back after exactly five attempts") {
    std::vector<MockReply> script(5, MockReply::fail(ErrorKind::quota_exceeded));
    Harness h(script, 2);
    auto out = h.handler.call(req());
    CHECK_FALSE(out.response);
    CHECK(out.attempts == 5);
    CHECK(h.pool.current_index() == 1);  // five switches on a pool of two
}

TEST_CASE("transient errors and validator rejections cost a retry only") {
    Harness h({MockReply::fail(ErrorKind::transient), MockReply::ok("garbage"), MockReply::ok("{}")});
    Validator v = [](const providers::ChatResponse& r) {
        if (r.content != "{}") throw providers::ProviderError(ErrorKind::transient, "not json");
    };
    auto out = h.handler.call(req(), v);
    REQUIRE(out.response);
    CHECK(out.attempts == 3);
    CHECK(h.clock.sleeps().empty());
    CHECK(h.pool.current_index() == 0);
}

TEST_CASE("fatal errors rotate") {
    Harness h({MockReply::fail(ErrorKind::fatal), MockReply::ok("ok")}, 2);
    auto out = h.handler.call(req());
    REQUIRE(out.response);
    CHECK(out.model_used == "mock/m1");
}

TEST_CASE("event log sequence numbers are gap-free and listeners see every line") {
    VirtualClock clock;
    EventLog log(&clock);
    std::vector<std::string> lines;
    log.add_listener([&](const std::string& l) { lines.push_back(l); });
    log.note("a");
    log.step_start(1, "design");
    log.rotate("s", 0, 1, ErrorKind::fatal);
    auto evs = log.events();
    REQUIRE(evs.size() == 3);
    for (std::size_t i = 0; i < evs.size(); ++i) {
        CHECK(evs[i]["seq"] == i);
        CHECK(evs[i].contains("t"));
        CHECK(nlohmann::json::parse(lines[i]) == evs[i]);
    }
    CHECK(EventLog().events().empty());
}

TEST_CASE("step results round trip through json") {
    StepResult r{3, query::StepAction::design, "text", {{"A.java", "java", "class A {}\n"}}, "mock/m0", 2, false, ""};
    auto back = step_result_from_json(to_json(r));
    CHECK(back.step_id == 3);
    CHECK(back.action == query::StepAction::design);
    CHECK(back.produced_code == r.produced_code);
    CHECK(back.attempts == 2);
}

TEST_CASE("capability routing and fallback content") {
    CHECK(capability_for(query::StepAction::generate_pipeline) == providers::Capability::codegen);
    CHECK(capability_for(query::StepAction::design) == providers::Capability::planning);
    query::PlanStep s{4, query::StepAction::generate_pipeline, {}, query::StepStatus::running};
    auto f = generate_fallback_result(s, "quota");
    CHECK(f.fallback);
    CHECK(f.produced_code.empty());
    CHECK(f.content == generate_fallback_result(s, "quota").content);
    CHECK(f.content.find("```") == std::string::npos);
}

TEST_CASE("a step whose provider never answers degrades to a fallback") {
    std::vector<MockReply> script(5, MockReply::fail(ErrorKind::rate_limit));
    Harness h(script);
    query::PlanStep s{1, query::StepAction::generate_pipeline, {}, query::StepStatus::running};
    auto r = execute_step_with_retry(h.handler, s, req("step:generate_pipeline"));
    CHECK(r.fallback);
    CHECK(r.attempts == 5);
    CHECK(r.produced_code.empty());
}

TEST_CASE("a successful step extracts its code") {
    Harness h({MockReply::ok("here\n```java\npublic class WordCount {}\n```\n")});
    query::PlanStep s{4, query::StepAction::generate_pipeline, {}, query::StepStatus::running};
    auto r = execute_step_with_retry(h.handler, s, req());
    CHECK_FALSE(r.fallback);
    REQUIRE(r.produced_code.size() == 1);
    CHECK(r.produced_code[0].filename == "WordCount.java");
}

TEST_CASE("scheduler: random DAGs run in a valid order with one result per step") {
    oracle::Rng rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        auto plan = fixture::random_plan(rng);
        int workers = 1 + static_cast<int>(rng.below(4));
        Harness h({}, 1, nullptr, true);
        std::vector<int> sunk;
        std::mutex mu;
        auto prompt = [](const query::PlanStep& s, const std::vector<const StepResult*>& deps) {
            CHECK(deps.size() == s.deps.size());
            return providers::ChatRequest{"step:" + query::to_string(s.action), "", "Query: x"};
        };
        auto results = run_plan(h.handler, plan, prompt,
                                [&](const StepResult& r) {
                                    std::lock_guard lock(mu);
                                    sunk.push_back(r.step_id);
                                },
                                {workers, std::nullopt});
        REQUIRE(results.size() == plan.steps.size());
        for (std::size_t i = 0; i < results.size(); ++i) {
            CHECK(results[i].step_id == plan.steps[i].id);
            CHECK(plan.steps[i].terminal());
        }
        CHECK(sunk.size() == plan.steps.size());
        CHECK(fixture::schedule_violation(plan, h.log.events()) == "");
    }
}

TEST_CASE("single worker follows the topological order") {
    oracle::Rng rng(59);
    for (int trial = 0; trial < 30; ++trial) {
        auto plan = fixture::random_plan(rng);
        auto order = plan.topological_order();
        Harness h({}, 1, nullptr, true);
        run_plan(h.handler, plan, [](const query::PlanStep&, const std::vector<const StepResult*>&) {
            return providers::ChatRequest{"x", "", ""};
        });
        std::vector<int> started;
        for (const auto& ev : h.log.events_of("step_start")) started.push_back(ev["step"].get<int>());
        CHECK(started == order);
    }
}

TEST_CASE("run_plan refuses non-pending steps and invalid plans") {
    Harness h({}, 1, nullptr, true);
    auto prompt = [](const query::PlanStep&, const std::vector<const StepResult*>&) {
        return providers::ChatRequest{"x", "", ""};
    };
    query::ExecutionPlan plan;
    plan.steps.push_back({1, query::StepAction::synthesize_response, {}, query::StepStatus::completed});
    CHECK_THROWS_AS(run_plan(h.handler, plan, prompt), query::PlanError);
    query::ExecutionPlan cyclic;
    cyclic.steps.push_back({1, query::StepAction::design, {2}, query::StepStatus::pending});
    cyclic.steps.push_back({2, query::StepAction::synthesize_response, {1}, query::StepStatus::pending});
    CHECK_THROWS_AS(run_plan(h.handler, cyclic, prompt), query::PlanError);
}

TEST_CASE("a throwing sink surfaces after the workers stop") {
    Harness h({}, 1, nullptr, true);
    oracle::Rng rng(61);
    auto plan = fixture::random_plan(rng);
    auto prompt = [](const query::PlanStep&, const std::vector<const StepResult*>&) {
        return providers::ChatRequest{"x", "", ""};
    };
    CHECK_THROWS_AS(run_plan(h.handler, plan, prompt, [](const StepResult&) { throw std::runtime_error("disk full"); },
                             {3, std::nullopt}),
                    std::runtime_error);
}

}  // TEST_SUITE
