#include <catch2/catch_amalgamated.hpp>

#include <seamkit/codec.hpp>
#include <seamkit/rng.hpp>

using namespace seamkit;

namespace {

SeamSegment random_bin_centered_segment(Rng& rng, const CodecConfig& cfg) {
    auto coord = [&] { return dequantize(int(rng.uniform_int(0, cfg.bins - 1)), cfg); };
    while (true) {
        SeamSegment s{{coord(), coord(), coord()}, {coord(), coord(), coord()}};
        if (!s.degenerate()) return s;
    }
}

SeamSequence random_canonical_seq(Rng& rng, int n, const CodecConfig& cfg = {}) {
    std::vector<SeamSegment> segs;
    for (int i = 0; i < n; ++i) segs.push_back(random_bin_centered_segment(rng, cfg));
    return canonical_sort(segs);
}

} // namespace

TEST_CASE("quantize edge cases and clamping") {
    REQUIRE(quantize(-1.0) == 0);
    REQUIRE(quantize(1.0) == 1023);
    REQUIRE(quantize(0.0) == 512);
    REQUIRE(quantize(1.0 + 1e-10) == 1023);
    REQUIRE(quantize(-1.0 - 1e-10) == 0);
    REQUIRE_THROWS_AS(quantize(1.1), ValidationError);
    REQUIRE_THROWS_AS(quantize(std::nan("")), ValidationError);
    REQUIRE_THROWS_AS(quantize(std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("dequantize returns bin centers") {
    REQUIRE(dequantize(0) == Catch::Approx(-0.9990234375).margin(0));
    REQUIRE(dequantize(1023) == Catch::Approx(0.9990234375).margin(0));
    REQUIRE_THROWS_AS(dequantize(-1), ValidationError);
    REQUIRE_THROWS_AS(dequantize(1024), ValidationError);
    for (int b = 0; b < 1024; ++b) REQUIRE(quantize(dequantize(b)) == b);
}

TEST_CASE("quantization error bounded by one bin") {
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double c = rng.uniform(-1.0, 1.0);
        worst = std::max(worst, std::abs(c - dequantize(quantize(c))));
    }
    REQUIRE(worst <= 1.0 / 1024);
}

TEST_CASE("configurable bin count shifts control tokens") {
    CodecConfig cfg;
    cfg.bins = 256;
    REQUIRE(cfg.bos() == 256);
    REQUIRE(cfg.eos() == 257);
    REQUIRE(cfg.pad() == 258);
    REQUIRE(cfg.vocab_size() == 259);
    for (int b = 0; b < 256; ++b) REQUIRE(quantize(dequantize(b, cfg), cfg) == b);
}

TEST_CASE("canonical_sort orders by yzx, head then tail") {
    SECTION("endpoint swap") {
        auto seq = canonical_sort({SeamSegment{{0, 1, 0}, {0, 0, 0}}});
        REQUIRE(seq.segments[0].head == Vec3{0, 0, 0});
        REQUIRE(seq.segments[0].tail == Vec3{0, 1, 0});
    }
    SECTION("tail key breaks ties on equal heads") {
        SeamSegment a{{0, 0, 0}, {0, 1, 0}};
        SeamSegment b{{0, 0, 0}, {1, 0, 0}};
        auto seq = canonical_sort({a, b});
        // tail (1,0,0) has yzx key (0,0,1) < (1,0,0), so b comes first
        REQUIRE(seq.segments[0].tail == Vec3{1, 0, 0});
        REQUIRE(seq.segments[1].tail == Vec3{0, 1, 0});
    }
    SECTION("idempotent and permutation/swap invariant") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<SeamSegment> segs;
            for (int i = 0; i < 12; ++i) segs.push_back(random_bin_centered_segment(rng, {}));
            auto base = canonical_sort(segs);
            REQUIRE(canonical_sort(base.segments).segments == base.segments);

            // shuffle and randomly flip endpoints
            std::vector<SeamSegment> mixed = segs;
            for (size_t i = mixed.size(); i > 1; --i)
                std::swap(mixed[i - 1], mixed[rng.uniform_int(0, int(i) - 1)]);
            for (auto& s : mixed)
                if (rng.u01() < 0.5) std::swap(s.head, s.tail);
            REQUIRE(canonical_sort(mixed).segments == base.segments);
        }
    }
    SECTION("duplicates removed") {
        SeamSegment a{{0, 0, 0}, {0, 1, 0}};
        auto seq = canonical_sort({a, a, {{0, 1, 0}, {0, 0, 0}}});
        REQUIRE(seq.count() == 1);
    }
    SECTION("degenerate-only input rejected") {
        REQUIRE_THROWS_AS(canonical_sort({SeamSegment{{0, 0, 0}, {0, 0, 0}}}), ValidationError);
        REQUIRE_THROWS_AS(canonical_sort({}), ValidationError);
    }
}

TEST_CASE("segment comparator is a strict total order") {
    Rng rng(11);
    CodecConfig tiny;
    tiny.bins = 4; // coarse bins force plenty of exact ties
    auto rand_seg = [&] {
        SeamSegment s = random_bin_centered_segment(rng, tiny);
        s.canonicalize();
        return s;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        SeamSegment a = rand_seg(), b = rand_seg(), c = rand_seg();
        // antisymmetry
        if (segment_less(a, b)) REQUIRE_FALSE(segment_less(b, a));
        if (!segment_less(a, b) && !segment_less(b, a)) REQUIRE(a == b);
        // transitivity
        if (segment_less(a, b) && segment_less(b, c)) REQUIRE(segment_less(a, c));
    }
}

TEST_CASE("encode layout: BOS + 6 per segment + EOS") {
    Rng rng(3);
    auto seq = random_canonical_seq(rng, 5);
    TokenStream t = encode(seq);
    CodecConfig cfg;
    REQUIRE(t.size() == 32);
    REQUIRE(t.tokens.front() == cfg.bos());
    REQUIRE(t.tokens.back() == cfg.eos());
    // first segment occupies tokens 1..6 as x_h y_h z_h x_t y_t z_t
    const SeamSegment& s = seq.segments[0];
    REQUIRE(t.tokens[1] == quantize(s.head.x));
    REQUIRE(t.tokens[2] == quantize(s.head.y));
    REQUIRE(t.tokens[3] == quantize(s.head.z));
    REQUIRE(t.tokens[4] == quantize(s.tail.x));
    REQUIRE(t.tokens[5] == quantize(s.tail.y));
    REQUIRE(t.tokens[6] == quantize(s.tail.z));
}

TEST_CASE("encode rejects oversize sequences") {
    Rng rng(5);
    auto seq = random_canonical_seq(rng, 10);
    CodecConfig small;
    small.max_segments = 9;
    REQUIRE_THROWS_AS(encode(seq, small), ValidationError);
}

TEST_CASE("decode inverts encode on bin-centered seams") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        auto seq = random_canonical_seq(rng, 1 + int(rng.uniform_int(0, 19)));
        REQUIRE(decode(encode(seq)) == seq);
    }
}

TEST_CASE("encode inverts decode on valid streams") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto t = encode(random_canonical_seq(rng, 1 + int(rng.uniform_int(0, 11))));
        REQUIRE(encode(decode(t)) == t);
    }
}

TEST_CASE("decode handles degenerate and malformed streams") {
    CodecConfig cfg;
    SECTION("degenerate segment dropped") {
        TokenStream t;
        t.tokens = {cfg.bos(), 5, 6, 7, 5, 6, 7, 1, 2, 3, 4, 5, 6, cfg.eos()};
        auto res = decode_verbose(t);
        REQUIRE(res.seam.count() == 1);
        REQUIRE(res.dropped_degenerate == 1);
    }
    SECTION("missing BOS") {
        TokenStream t;
        t.tokens = {1, 2, 3, 4, 5, 6, cfg.eos()};
        REQUIRE_THROWS_AS(decode(t), ValidationError);
    }
    SECTION("misplaced control token names position") {
        using Catch::Matchers::ContainsSubstring;
        TokenStream t;
        t.tokens = {cfg.bos(), 1, 2, cfg.pad(), 4, 5, 6, cfg.eos()};
        REQUIRE_THROWS_MATCHES(decode(t), ValidationError,
                               Catch::Matchers::MessageMatches(ContainsSubstring("position 3")));
    }
    SECTION("truncated segment reports index") {
        TokenStream t;
        t.tokens = {cfg.bos(), 1, 2, 3, 4, cfg.eos()};
        REQUIRE_THROWS_AS(decode(t), ValidationError);
    }
    SECTION("pad tail accepted, other tails rejected") {
        Rng rng(23);
        TokenStream t = encode(random_canonical_seq(rng, 2));
        t.tokens.push_back(cfg.pad());
        t.tokens.push_back(cfg.pad());
        REQUIRE(decode(t).count() == 2);
        t.tokens.push_back(7);
        REQUIRE_THROWS_AS(decode(t), ValidationError);
    }
    SECTION("empty stream decodes to empty sequence") {
        TokenStream t;
        t.tokens = {cfg.bos(), cfg.eos()};
        REQUIRE(decode(t).empty());
    }
}

TEST_CASE("seam JSON round-trip") {
    Rng rng(29);
    auto seq = random_canonical_seq(rng, 7);
    auto j = seam_to_json(seq);
    REQUIRE(j["normalized"].get<bool>());
    auto back = seam_from_json(j);
    REQUIRE(back == seq);
}

TEST_CASE("token binary round-trip") {
    Rng rng(31);
    auto t = encode(random_canonical_seq(rng, 9));
    std::string path = "tokens_roundtrip.bin";
    save_tokens_binary(t, path);
    REQUIRE(load_tokens_binary(path) == t);
    std::remove(path.c_str());
}
