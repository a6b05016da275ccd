#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ductmc/comms.hpp"
#include "ductmc/scenario_io.hpp"
#include "test_util.hpp"

using namespace ductmc;
using ductmc::testutil::thrown_code;

namespace {

// Single-receiver, single-species CIR with all mass in the first bin:
// every emitted molecule arrives within its own slot, with certainty.
ChannelImpulseResponse perfect_cir(std::int64_t emitted, double bin_width_s, size_t n_bins) {
  ChannelImpulseResponse cir;
  cir.bin_width_s = bin_width_s;
  cir.emitted = emitted;
  cir.counts = {std::vector<std::int64_t>(n_bins, 0)};
  cir.counts[0][0] = emitted;
  return cir;
}

}  // namespace

TEST_CASE("scheme constructors and arity") {
  const ModulationScheme b = bcsk(1000, 1.0);
  CHECK(b.kind == SchemeKind::CSK);
  REQUIRE(b.molecules_per_level.size() == 2);
  CHECK(b.molecules_per_level[0] == 0);
  CHECK(b.molecules_per_level[1] == 1000);
  CHECK(bits_per_symbol(b) == 1);
  CHECK(detection_slot_duration(b) == doctest::Approx(1.0));

  ModulationScheme four = b;
  four.molecules_per_level = {0, 10, 20, 30};
  CHECK(bits_per_symbol(four) == 2);

  ModulationScheme three = b;
  three.molecules_per_level = {0, 10, 20};
  CHECK(thrown_code([&] { bits_per_symbol(three); }) == "BadSchemeArity");

  const ModulationScheme p = ppm(4, 500, 1.0);
  CHECK(bits_per_symbol(p) == 2);
  CHECK(detection_slot_duration(p) == doctest::Approx(0.25));

  const ModulationScheme m = mosk({7, 9}, 300, 1.0);
  CHECK(bits_per_symbol(m) == 1);
  CHECK(detection_slot_duration(m) == doctest::Approx(1.0));
}

TEST_CASE("modulation schedules") {
  SUBCASE("binary CSK skips zero symbols") {
    const ModulationResult r = modulate({1, 0, 1}, bcsk(1000, 1.0));
    CHECK(r.n_symbols == 3);
    CHECK(r.padded_bits == 0);
    REQUIRE(r.schedule.size() == 2);
    CHECK(r.schedule[0].time_s == doctest::Approx(0.0));
    CHECK(r.schedule[0].count == 1000);
    CHECK(r.schedule[1].time_s == doctest::Approx(2.0));
    CHECK(r.schedule[1].count == 1000);
  }

  SUBCASE("multi-level CSK maps bits MSB-first") {
    ModulationScheme four = bcsk(0, 1.0);
    four.molecules_per_level = {0, 10, 20, 30};
    const ModulationResult r = modulate({1, 0}, four);
    REQUIRE(r.schedule.size() == 1);
    CHECK(r.schedule[0].count == 20);  // symbol value 2
  }

  SUBCASE("PPM places the pulse in the selected sub-slot") {
    const ModulationResult r = modulate({1, 0}, ppm(4, 500, 1.0));
    CHECK(r.n_symbols == 1);
    REQUIRE(r.schedule.size() == 1);
    CHECK(r.schedule[0].time_s == doctest::Approx(0.5));  // slot 2 of 4
    CHECK(r.schedule[0].count == 500);

    const ModulationResult padded = modulate({1}, ppm(4, 500, 1.0));
    CHECK(padded.padded_bits == 1);
    REQUIRE(padded.schedule.size() == 1);
    CHECK(padded.schedule[0].time_s == doctest::Approx(0.5));
  }

  SUBCASE("MoSK selects the species") {
    const ModulationResult r = modulate({0, 1}, mosk({7, 9}, 300, 1.0));
    REQUIRE(r.schedule.size() == 2);
    CHECK(r.schedule[0].species_id == 7);
    CHECK(r.schedule[0].time_s == doctest::Approx(0.0));
    CHECK(r.schedule[1].species_id == 9);
    CHECK(r.schedule[1].time_s == doctest::Approx(1.0));
    CHECK(r.schedule[1].count == 300);
  }
}

TEST_CASE("slot fractions from a measured response") {
  ChannelImpulseResponse cir;
  cir.bin_width_s = 0.25;
  cir.emitted = 100;
  cir.counts = {{10, 20, 30, 40}};
  const std::vector<double> f = slot_fractions(cir, 0, 0.5, 2);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == doctest::Approx(0.3));
  CHECK(f[1] == doctest::Approx(0.7));
  CHECK(thrown_code([&] { slot_fractions(cir, 0, 0.3, 2); }) == "BinSlotMismatch");
}

TEST_CASE("binomial draws") {
  SUBCASE("degenerate probabilities") {
    RngStream rng(77, 0);
    CHECK(binomial_draw(rng, 100, 0.0) == 0);
    CHECK(binomial_draw(rng, 100, 1.0) == 100);
    CHECK(binomial_draw(rng, 0, 0.5) == 0);
  }

  SUBCASE("identical streams give identical draws") {
    RngStream a(77, 1), b(77, 1);
    for (int i = 0; i < 20; ++i) CHECK(binomial_draw(a, 50, 0.37) == binomial_draw(b, 50, 0.37));
  }

  SUBCASE("moments at moderate n") {
    RngStream rng(77, 2);
    const int reps = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < reps; ++i) {
      const double x = double(binomial_draw(rng, 100, 0.3));
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    CHECK(mean == doctest::Approx(30.0).epsilon(1.0 / 30.0));
    CHECK(var == doctest::Approx(21.0).epsilon(3.0 / 21.0));
  }

  SUBCASE("sparse large-n path") {
    RngStream rng(77, 3);
    const int reps = 20000;
    double sum = 0.0;
    for (int i = 0; i < reps; ++i) sum += double(binomial_draw(rng, 1000000, 1e-5));
    CHECK(sum / reps == doctest::Approx(10.0).epsilon(0.02));
  }
}

TEST_CASE("semi-analytic reception superposes deterministically") {
  const ChannelImpulseResponse cir = perfect_cir(100, 0.5, 2);
  const std::map<int, const ChannelImpulseResponse*> by_species{{0, &cir}};

  ReceivedFrame frame = make_received_frame(1.0, 3, {0}, 1);
  const TxSchedule schedule{{0.0, 50, 0, 0}, {0.0, 70, 0, 0}, {1.0, 40, 0, 0}};
  RngStream rng(5, 0);
  accumulate_semi_analytic(frame, 0, schedule, by_species, 0, rng);
  REQUIRE(frame.counts.size() == 1);
  REQUIRE(frame.counts[0].size() == 1);
  CHECK(frame.counts[0][0][0] == 120);  // two same-slot pulses add exactly
  CHECK(frame.counts[0][0][1] == 40);
  CHECK(frame.counts[0][0][2] == 0);

  RngStream rng2(5, 0);
  const ReceivedFrame direct =
      synthesize_received_semi_analytic(schedule, by_species, 0, 1.0, 3, rng2);
  CHECK(direct.counts[0][0] == frame.counts[0][0]);
}

TEST_CASE("fixed detection per scheme") {
  SUBCASE("binary CSK thresholds slot counts") {
    ReceivedFrame frame = make_received_frame(1.0, 2, {0}, 1);
    frame.counts[0][0] = {1200, 30};
    const Bits bits = detect_fixed(frame, bcsk(1000, 1.0), 600.0);
    CHECK(bits == Bits{1, 0});
  }

  SUBCASE("non-binary CSK is not thresholdable") {
    ReceivedFrame frame = make_received_frame(1.0, 1, {0}, 1);
    frame.counts[0][0] = {5};
    ModulationScheme four = bcsk(10, 1.0);
    four.molecules_per_level = {0, 5, 10, 15};
    CHECK(thrown_code([&] { detect_fixed(frame, four, 3.0); }) == "BadSchemeArity");
  }

  SUBCASE("PPM takes the argmax sub-slot, ties to the earliest") {
    ReceivedFrame frame = make_received_frame(0.5, 4, {0}, 1);
    frame.counts[0][0] = {5, 9, 7, 7};
    const Bits bits = detect_fixed(frame, ppm(2, 100, 1.0), 0.0);
    CHECK(bits == Bits{1, 0});
  }

  SUBCASE("MoSK takes the argmax species column") {
    ReceivedFrame frame = make_received_frame(1.0, 2, {7, 9}, 1);
    frame.counts[0][0] = {3, 6};  // species 7 per slot
    frame.counts[0][1] = {8, 6};  // species 9 per slot
    const Bits bits = detect_fixed(frame, mosk({7, 9}, 100, 1.0), 0.0);
    CHECK(bits == Bits{1, 0});  // tie in slot 1 resolves to column 0
  }
}

TEST_CASE("adaptive threshold arithmetic") {
  AdaptiveDetector det;
  det.base_threshold = 30.0;
  det.isi_memory = 3;
  det.own_fractions = {0.6, 0.3, 0.1};
  det.own_molecules = 1000;

  const Bits prior{1, 0};
  CHECK(adaptive_threshold(det, prior, {}, 0) == doctest::Approx(30.0));
  CHECK(adaptive_threshold(det, prior, {}, 1) == doctest::Approx(30.0 + 300.0));
  CHECK(adaptive_threshold(det, prior, {}, 2) == doctest::Approx(30.0 + 100.0));
  CHECK(adaptive_threshold(det, prior, {}, 3) == doctest::Approx(30.0));

  SUBCASE("interference leg needs its response") {
    DetectionConfig config;
    config.kind = DetectionConfig::Kind::Adaptive;
    config.base_threshold = 30.0;
    config.isi_memory = 2;
    config.ili_enabled = true;
    const ChannelImpulseResponse cir = perfect_cir(100, 1.0, 4);
    CHECK(thrown_code([&] { make_adaptive_detector(config, cir, 0, 1.0, 100); }) ==
          "MissingCrossCir");
  }

  SUBCASE("cross decisions raise the threshold when enabled") {
    AdaptiveDetector ili = det;
    ili.ili_enabled = true;
    ili.cross_fractions = {0.5, 0.2};
    ili.cross_molecules = 500;
    const Bits cross{1, 1};
    CHECK(adaptive_threshold(ili, prior, cross, 2) ==
          doctest::Approx(30.0 + 100.0 + 500.0 * 0.2));
  }
}

TEST_CASE("adaptive detection subtracts its own tail") {
  // Channel that spills 40% of each pulse into the following slot.
  ChannelImpulseResponse cir;
  cir.bin_width_s = 1.0;
  cir.emitted = 100;
  cir.counts = {{60, 40}};

  DetectionConfig config;
  config.kind = DetectionConfig::Kind::Adaptive;
  config.base_threshold = 30.0;
  config.isi_memory = 1;

  const AdaptiveDetector det =
      make_adaptive_detector(config, cir, 0, 1.0, 100);
  CHECK(det.own_fractions.size() == 2);
  CHECK(det.own_fractions[1] == doctest::Approx(0.4));

  // Sent 1,0: slot 0 sees 60, slot 1 sees only the 40-molecule tail. The
  // fixed rule at theta=35 calls that tail a second 1; the adaptive rule
  // lifts the slot-1 threshold to 70 and gets 1,0.
  ReceivedFrame frame = make_received_frame(1.0, 2, {0}, 1);
  frame.counts[0][0] = {60, 40};
  const ModulationScheme scheme = bcsk(100, 1.0);
  CHECK(detect_fixed(frame, scheme, 35.0) == Bits{1, 1});
  CHECK(detect_adaptive(frame, scheme, det) == Bits{1, 0});
  CHECK(detect(frame, scheme, config, &cir) == Bits{1, 0});
  CHECK(thrown_code([&] { detect(frame, scheme, config, nullptr); }) == "EmptyCir");
}

TEST_CASE("paired adaptive detection runs slot by slot") {
  const ModulationScheme scheme = bcsk(100, 1.0);
  AdaptiveDetector det;
  det.base_threshold = 50.0;

  ReceivedFrame a = make_received_frame(1.0, 2, {0}, 1);
  a.counts[0][0] = {100, 0};
  ReceivedFrame b = make_received_frame(1.0, 2, {0}, 1);
  b.counts[0][0] = {0, 100};

  const auto [bits_a, bits_b] = detect_adaptive_pair(a, b, scheme, det, det);
  CHECK(bits_a == Bits{1, 0});
  CHECK(bits_b == Bits{0, 1});

  ReceivedFrame short_frame = make_received_frame(1.0, 1, {0}, 1);
  short_frame.counts[0][0] = {0};
  CHECK(thrown_code([&] { detect_adaptive_pair(a, short_frame, scheme, det, det); }) ==
        "InvalidField");
}

TEST_CASE("constrained code blocks adjacent ones") {
  SUBCASE("codebook round trip") {
    const ConstrainedEncodeResult enc = encode_constrained({0, 1, 1, 1, 1, 0});
    CHECK(enc.padded_bits == 0);
    CHECK(enc.bits == Bits{0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0});
    CHECK(decode_constrained(enc.bits) == Bits{0, 1, 1, 1, 1, 0});
  }

  SUBCASE("odd data length pads with a zero") {
    const ConstrainedEncodeResult enc = encode_constrained({1});
    CHECK(enc.padded_bits == 1);
    CHECK(enc.bits == Bits{0, 0, 1, 0});
    CHECK(decode_constrained(enc.bits) == Bits{1, 0});
  }

  SUBCASE("no two consecutive ones for any input") {
    RngStream rng(123, 0);
    Bits data(20000);
    for (auto& b : data) b = rng.bernoulli(0.5) ? 1 : 0;
    const Bits code = encode_constrained(data).bits;
    for (size_t i = 1; i < code.size(); ++i) CHECK(code[i - 1] + code[i] <= 1);
    CHECK(decode_constrained(code) == data);
  }

  SUBCASE("strict decode rejects garbage") {
    CHECK(thrown_code([] { decode_constrained({1, 1, 1, 1}); }) == "InvalidCodeword");
    CHECK(thrown_code([] { decode_constrained({0, 0, 0}); }) == "BadLength");
    CHECK(thrown_code([] { decode_constrained_nearest({0, 0, 0}); }) == "BadLength");
  }

  SUBCASE("nearest decode breaks ties toward the lower data value") {
    // 0011 is distance 1 from both 0001 (data 01) and 0010 (data 10).
    CHECK(decode_constrained_nearest({0, 0, 1, 1}) == Bits{0, 1});
    // Clean codewords pass through unchanged.
    CHECK(decode_constrained_nearest({0, 1, 0, 0}) == Bits{1, 1});
  }
}

TEST_CASE("telegraph code") {
  SUBCASE("single letter emits b1 first") {
    const Ita2EncodeResult enc = ita2_encode("A");  // code 3 = 00011
    CHECK(enc.shifts_inserted == 0);
    CHECK(enc.bits == Bits{1, 1, 0, 0, 0});
  }

  SUBCASE("mixed text round trip with one case shift") {
    const std::string text = "HELLO WORLD 123";
    const Ita2EncodeResult enc = ita2_encode(text);
    CHECK(enc.shifts_inserted == 1);
    CHECK(enc.bits.size() == 5 * (text.size() + 1));
    CHECK(ita2_decode(enc.bits) == text);
  }

  SUBCASE("lower case folds to upper") {
    CHECK(ita2_decode(ita2_encode("hello").bits) == "HELLO");
  }

  SUBCASE("case returns after figures") {
    CHECK(ita2_decode(ita2_encode("A1A").bits) == "A1A");
    CHECK(ita2_encode("A1A").shifts_inserted == 2);
  }

  SUBCASE("unsupported characters raise on encode") {
    CHECK(thrown_code([] { ita2_encode("~"); }) == "UnsupportedCharacter");
  }

  SUBCASE("blank codes raise strictly and map to ? lossily") {
    const Bits blank{0, 0, 0, 0, 0};
    CHECK(thrown_code([&] { ita2_decode(blank); }) == "UnsupportedCharacter");
    CHECK(ita2_decode_lossy(blank) == "?");
    CHECK(thrown_code([] { ita2_decode({0, 1, 0}); }) == "BadLength");
  }

  SUBCASE("tables match the documented alphabet") {
    std::ifstream in(std::string(DUCTMC_SOURCE_DIR) + "/docs/ita2_table.txt");
    REQUIRE(in.good());
    auto expected_char = [](const std::string& name) -> char {
      if (name == "NUL") return '\0';
      if (name == "LF") return '\n';
      if (name == "CR") return '\r';
      if (name == "BEL") return '\a';
      if (name == "SP") return ' ';
      if (name == "FIGS") return '\x1b';
      if (name == "LTRS") return '\x1f';
      REQUIRE(name.size() == 1);
      return name[0];
    };
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      int value;
      std::string letters, figures;
      REQUIRE((row >> value >> letters >> figures));
      CHECK(ita2_letters_table()[size_t(value)] == expected_char(letters));
      CHECK(ita2_figures_table()[size_t(value)] == expected_char(figures));
      ++rows;
    }
    CHECK(rows == 32);
  }
}

TEST_CASE("bit error evaluation") {
  const BerResult r = evaluate_ber({1, 0, 1, 1}, {1, 1, 1, 0});
  CHECK(r.bits_compared == 4);
  CHECK(r.bit_errors == 2);
  CHECK(r.ber == doctest::Approx(0.5));
  CHECK(evaluate_ber({}, {}).ber == doctest::Approx(0.0));
  CHECK(thrown_code([] { evaluate_ber({1, 0}, {1}); }) == "LengthMismatch");
}

TEST_CASE("spatial multiplexing needs and uses two of everything") {
  SimulationScenario s = preset_scenario("vein");
  s.molecules_per_emission = 300;
  s.end_time_s = 0.1;
  s.receivers = {{1990.0, 0.0, 5.0}, {1990.0, M_PI, 5.0}};
  CHECK(thrown_code([&] { simulate_mimo(s, 2); }) == "BadPlacement");

  s.tx_position_b = SurfacePoint{0.0, M_PI};
  const MimoLink link = simulate_mimo(s, 2);
  CHECK(link.ledger_tx0.emitted == 300);
  CHECK(link.ledger_tx1.emitted == 300);
  CHECK(link.ledger_tx0.balanced());
  CHECK(link.ledger_tx1.balanced());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(link.h[size_t(i)][size_t(j)].n_bins() > 0);
      CHECK(link.h[size_t(i)][size_t(j)].emitted == 300);
    }

  SimulationScenario one_rx = s;
  one_rx.receivers.resize(1);
  CHECK(thrown_code([&] { simulate_mimo(one_rx, 2); }) == "BadPlacement");
}
