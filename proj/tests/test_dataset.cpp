#include <algorithm>
#include <cctype>
#include <optional>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cod2m/dataset.hpp"
#include "cod2m/error.hpp"
#include "cod2m/synthgen.hpp"
#include "cod2m/text.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cod2m;

namespace {

Sample make_sample(std::int64_t id, int day, double y, bool label) {
  Sample s;
  s.id = id;
  s.condition.day = day;
  s.position = {100.0, y};
  s.label = label;
  for (auto& f : s.features) f.assign(4, 0.25);
  return s;
}

std::string two_sample_file() {
  return "cod2m-dataset v1\n"
         "dims VS=4 IR=4 UV=4 TM=4 GP=4 terrain=670x1100\n"
         "0,1,morning,0.9,0.2,100,200,1,VS:1;0.5;0;0.25,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0\n"
         "1,2,afternoon,0.5,0.9,150,700,0,VS:0;0;0;0,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0.1;0.2;0.3;0.4\n";
}

std::vector<std::int64_t> ids_of(const Dataset& d) {
  std::vector<std::int64_t> ids;
  for (const auto& s : d.samples()) ids.push_back(s.id);
  return ids;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("well-formed two-sample file loads with its ids") {
    std::istringstream in(two_sample_file());
    const auto d = read_dataset(in);
    CHECK(d.size() == 2);
    CHECK(ids_of(d) == std::vector<std::int64_t>{0, 1});
    CHECK(d.samples()[0].feature(SensorKind::VS) == FeatureVector{1, 0.5, 0, 0.25});
    CHECK(d.samples()[1].condition.time_of_day == TimeOfDay::Afternoon);
  }

  TEST_CASE("wrong vector length is reported with the sample id") {
    auto text = two_sample_file();
    text.replace(text.find("GP:0.1;0.2;0.3;0.4"), 18, "GP:0.1;0.2;0.3");
    std::istringstream in(text);
    try {
      read_dataset(in);
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("sample 1") != std::string::npos);
    }
  }

  TEST_CASE("malformed files are parse errors") {
    const auto base = two_sample_file();
    for (const auto& bad : {std::string("cod2m-dataset v2\n") + base.substr(base.find('\n') + 1),
                            base + "2,1,morning,0.9,0.2,100,200,1,VS:0;0;0;0\n",
                            base + "2,1,noon,0.9,0.2,100,200,1,VS:0;0;0;0,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0\n",
                            base + "2,1,morning,0.9,0.2,100,200,2,VS:0;0;0;0,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0\n",
                            base + "2,1,morning,0.9,0.2,100,200,1,VS:0;0;0;0,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0,XX:0\n",
                            base + "2,1,morning,0.9,0.2,100,200,1,IR:0;0;0;0,VS:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0\n",
                            base + "2,1,morning,abc,0.2,100,200,1,VS:0;0;0;0,IR:0;0;0;0,UV:0;0;0;0,TM:0;0;0;0,GP:0;0;0;0\n"}) {
      std::istringstream in(bad);
      CHECK_THROWS_AS(read_dataset(in), ParseError);
    }
  }

  TEST_CASE("invariant violations are validation errors") {
    auto dup = two_sample_file();
    dup.replace(dup.rfind("\n1,"), 3, "\n0,");
    auto out_of_range = two_sample_file();
    out_of_range.replace(out_of_range.find("VS:1;"), 5, "VS:1.5;");
    auto outside = two_sample_file();
    outside.replace(outside.find(",150,700,"), 9, ",150,1200,");
    for (const auto& bad : {dup, out_of_range, outside}) {
      std::istringstream in(bad);
      CHECK_THROWS_AS(read_dataset(in), ValidationError);
    }
  }

  TEST_CASE("a dataset needs both classes") {
    CHECK_THROWS_AS(Dataset({}, {}), ValidationError);
    CHECK_THROWS_AS(Dataset({}, {make_sample(0, 1, 100, true), make_sample(1, 2, 100, true)}), ValidationError);
  }

  TEST_CASE("the synthetic campaign round-trips through a file bit-identically") {
    const auto d = synthgen::generate_dataset(synthgen::default_gen_config());
    const auto path = std::filesystem::temp_directory_path() / "cod2m_dataset_roundtrip.csv";
    save_dataset(d, path);
    CHECK(load_dataset(path) == d);
    std::ifstream in(path);
    std::size_t lines = 0, records = 0;
    for (std::string line; std::getline(in, line); ++lines) records += !line.empty() && std::isdigit(line[0]) ? 1 : 0;
    CHECK(records == 200);
    CHECK(lines == 203);  // magic, dims, note
    std::filesystem::remove(path);
  }

  TEST_CASE("missing files are I/O errors") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/cod2m.csv"), IoError);
  }

  TEST_CASE("property: load after save is the identity") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const auto d = testsupport::random_dataset(rng);
      std::stringstream buf;
      write_dataset(d, buf);
      const auto text = buf.str();
      REQUIRE(read_dataset(buf) == d);
      std::istringstream reread(text);
      std::stringstream again;
      write_dataset(read_dataset(reread), again);
      CHECK(again.str() == text);
    }
  }
}

TEST_SUITE("split") {
  TEST_CASE("C1 trains on day 1 and C2 is its mirror") {
    const Dataset d({}, {make_sample(0, 1, 100, true), make_sample(1, 1, 900, false), make_sample(2, 2, 100, true),
                         make_sample(3, 2, 900, false)});
    const auto c1 = split(d, {SplitKind::C1});
    CHECK(ids_of(c1.train) == std::vector<std::int64_t>{0, 1});
    CHECK(ids_of(c1.validation) == std::vector<std::int64_t>{2, 3});
    const auto c2 = split(d, {SplitKind::C2});
    CHECK(c2.train == c1.validation);
    CHECK(c2.validation == c1.train);
  }

  TEST_CASE("C1 and C2 need both days") {
    const Dataset d({}, {make_sample(0, 1, 100, true), make_sample(1, 1, 900, false)});
    CHECK_THROWS_AS(split(d, {SplitKind::C1}), ValidationError);
    CHECK_THROWS_AS(split(d, {SplitKind::C2}), ValidationError);
  }

  TEST_CASE("C3 splits by region and reports the unstratified side") {
    const Dataset ok({}, {make_sample(0, 1, 100, true), make_sample(1, 2, 300, false), make_sample(2, 1, 600, true),
                          make_sample(3, 2, 900, false)});
    const auto s = split(ok, {SplitKind::C3, 550.0});
    CHECK(ids_of(s.train) == std::vector<std::int64_t>{0, 1});
    CHECK(ids_of(s.validation) == std::vector<std::int64_t>{2, 3});

    const Dataset bad({}, {make_sample(0, 1, 100, true), make_sample(1, 2, 300, false), make_sample(2, 1, 600, false),
                           make_sample(3, 2, 900, false)});
    try {
      split(bad, {SplitKind::C3, 550.0});
      FAIL("expected a stratification error");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("validation") != std::string::npos);
      CHECK(msg.find("IED") != std::string::npos);
    }
  }

  TEST_CASE("synthetic campaign: C3 at 550 mm is a stratified partition") {
    const auto d = synthgen::generate_dataset(synthgen::default_gen_config());
    const auto s = split(d, {SplitKind::C3, 550.0});
    auto ids = ids_of(s.train);
    const auto v = ids_of(s.validation);
    ids.insert(ids.end(), v.begin(), v.end());
    std::sort(ids.begin(), ids.end());
    CHECK(ids == ids_of(d));
    for (const auto& sample : s.train.samples()) CHECK(sample.position.y < 550.0);
    for (const auto& sample : s.validation.samples()) CHECK(sample.position.y >= 550.0);
  }

  TEST_CASE("property: every split is a deterministic partition") {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
      const auto d = testsupport::random_dataset(rng);
      for (const auto kind : {SplitKind::C1, SplitKind::C2, SplitKind::C3}) {
        const SplitCase sc{kind, rng.uniform(0.0, 1100.0)};
        std::optional<Split> s;
        try {
          s = split(d, sc);
        } catch (const ValidationError&) {
          CHECK(kind == SplitKind::C3);
          continue;
        }
        auto ids = ids_of(s->train);
        const auto v = ids_of(s->validation);
        ids.insert(ids.end(), v.begin(), v.end());
        std::sort(ids.begin(), ids.end());
        auto all = ids_of(d);
        std::sort(all.begin(), all.end());
        CHECK(ids == all);
        const auto again = split(d, sc);
        CHECK(again.train == s->train);
        CHECK(again.validation == s->validation);
      }
    }
  }
}

TEST_SUITE("text") {
  TEST_CASE("reals survive a text round trip") {
    Rng rng(13);
    for (int i = 0; i < 10000; ++i) {
      const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.below(40)) - 20);
      CHECK(text::parse_real(text::format_real(v), "v") == v);
    }
    CHECK(text::format_real(0.1) == "0.10000000000000001");
  }

  TEST_CASE("parse_real rejects junk and non-finite values") {
    CHECK_THROWS_AS(text::parse_real("", "v"), ParseError);
    CHECK_THROWS_AS(text::parse_real("1.0x", "v"), ParseError);
    CHECK_THROWS_AS(text::parse_real("nan", "v"), ParseError);
    CHECK_THROWS_AS(text::parse_real("inf", "v"), ParseError);
    CHECK(text::parse_real("+0.5", "v") == 0.5);
  }
}
