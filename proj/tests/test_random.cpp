#include "srgg/parallel.hpp"
#include "srgg/random.hpp"

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

TEST(Random, StreamsAreReproducibleAndDistinct) {
    auto a = srgg::make_stream(7, 3);
    auto b = srgg::make_stream(7, 3);
    auto c = srgg::make_stream(7, 4);
    auto d = srgg::make_stream(8, 3);
    const auto va = a(), vb = b(), vc = c(), vd = d();
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vd);
}

TEST(Random, UniformRange) {
    auto g = srgg::make_stream(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = srgg::uniform01(g);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
    auto h = srgg::make_stream(2);
    for (int i = 0; i < 1000; ++i) EXPECT_GT(srgg::uniform01_open_low(h), 0.0);
}

TEST(Parallel, ChunkResultsIndependentOfThreadCount) {
    srgg::ChunkPlan plan{100'003, 1000};
    auto work = [](std::size_t c, std::size_t b, std::size_t e) {
        auto g = srgg::make_stream(42, c);
        srgg::MomentSum m;
        for (std::size_t i = b; i < e; ++i) m.add(srgg::uniform01(g));
        return m;
    };
    auto reduce = [](const std::vector<srgg::MomentSum>& parts) {
        srgg::MomentSum t;
        for (const auto& p : parts) t.merge(p);
        return t;
    };
    const auto one = reduce(srgg::run_chunks<srgg::MomentSum>(plan, work, 1));
    for (unsigned threads : {2u, 4u, 8u}) {
        const auto many = reduce(srgg::run_chunks<srgg::MomentSum>(plan, work, threads));
        EXPECT_EQ(one.sum, many.sum);
        EXPECT_EQ(one.sum_sq, many.sum_sq);
        EXPECT_EQ(one.count, many.count);
    }
    EXPECT_EQ(one.count, 100'003u);
}

TEST(Parallel, ExceptionsPropagate) {
    srgg::ChunkPlan plan{100, 10};
    auto bad = [](std::size_t c, std::size_t, std::size_t) -> int {
        if (c == 5) throw std::runtime_error("boom");
        return 0;
    };
    EXPECT_THROW(srgg::run_chunks<int>(plan, bad, 4), std::runtime_error);
    EXPECT_THROW(srgg::run_chunks<int>(plan, bad, 1), std::runtime_error);
}

TEST(Parallel, MomentSumStatistics) {
    srgg::MomentSum m;
    for (double v : {1.0, 2.0, 3.0, 4.0}) m.add(v);
    EXPECT_DOUBLE_EQ(m.mean(), 2.5);
    EXPECT_NEAR(m.variance(), 5.0 / 3.0, 1e-14);
    EXPECT_NEAR(m.std_error(), std::sqrt(5.0 / 12.0), 1e-14);
}
