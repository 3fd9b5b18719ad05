#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "rankvar/error.hpp"
#include "rankvar/io.hpp"
#include "rankvar/random.hpp"
#include "support.hpp"

using namespace rankvar;

namespace {

template <class F>
std::size_t parse_error_line(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(ParseReplicates, Basic) {
  std::istringstream in("item,value\nA,1\nA,2\nB,3\n");
  const auto ds = parse_replicates(in);
  ASSERT_EQ(ds.items.size(), 2u);
  EXPECT_EQ(ds.items[0].id, "A");
  EXPECT_EQ(ds.items[0].samples.size(), 2u);
  EXPECT_EQ(ds.items[1].samples.size(), 1u);
  EXPECT_EQ(ds.size_ratio(), 2.0);
}

TEST(ParseReplicates, FirstAppearanceOrder) {
  std::istringstream in("item,value\nZ,1\nA,2\nZ,3\r\n");
  const auto ds = parse_replicates(in);
  EXPECT_EQ(ds.items[0].id, "Z");
  EXPECT_EQ(ds.items[0].samples, (std::vector<double>{1, 3}));
}

TEST(ParseReplicates, Errors) {
  EXPECT_EQ(parse_error_line([] {
              std::istringstream in("item,value\nA,1\nA,abc\n");
              parse_replicates(in);
            }),
            3u);
  std::istringstream empty("");
  EXPECT_THROW(parse_replicates(empty), ParseError);
  EXPECT_EQ(parse_error_line([] {
              std::istringstream in("name,value\nA,1\n");
              parse_replicates(in);
            }),
            1u);
  std::istringstream header_only("item,value\n");
  EXPECT_THROW(parse_replicates(header_only), ParseError);
  std::istringstream quote("item,value\n\"A,1\n");
  EXPECT_THROW(parse_replicates(quote), ParseError);
  try {
    std::istringstream in("item,value\nA,1\nB,nope\n");
    parse_replicates(in, "items.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("items.csv:3"), std::string::npos);
  }
}

TEST(ParseTwoClass, Basic) {
  std::istringstream in("label,g1,g2\n0,1.5,2\n1,3,4\n");
  const auto ds = parse_twoclass(in);
  EXPECT_EQ(ds.observations(), 2u);
  EXPECT_EQ(ds.items(), 2u);
  EXPECT_EQ(ds.at(0, 0), 1.5);
  EXPECT_EQ(ds.at(1, 1), 4.0);
}

TEST(ParseTwoClass, Errors) {
  std::istringstream single("label,g1\n0,1\n0,2\n");
  EXPECT_THROW(parse_twoclass(single), ValidationError);
  EXPECT_EQ(parse_error_line([] {
              std::istringstream in("label,g1,g2\n0,1,2\n1,3\n");
              parse_twoclass(in);
            }),
            3u);
  EXPECT_EQ(parse_error_line([] {
              std::istringstream in("label,g1\n2,1\n");
              parse_twoclass(in);
            }),
            2u);
}

TEST(ParseBinomial, Basic) {
  std::istringstream in("item,successes,trials\nA,9,12\n");
  const auto ds = parse_binomial(in);
  ASSERT_EQ(ds.items.size(), 1u);
  EXPECT_EQ(ds.items[0].successes, 9u);
  EXPECT_EQ(ds.items[0].trials, 12u);
}

TEST(ParseBinomial, Errors) {
  std::istringstream over("item,successes,trials\nA,9,12\nB,13,12\n");
  try {
    parse_binomial(over, "schools.csv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("schools.csv:3"), std::string::npos);
  }
  EXPECT_EQ(parse_error_line([] {
              std::istringstream in("item,successes,trials\nA,-1,12\n");
              parse_binomial(in);
            }),
            2u);
}

TEST(RoundTrip, AllFormats) {
  RandomStream rng(1);
  for (int t = 0; t < 20; ++t) {
    Replicates r;
    for (std::size_t i = 0; i < 1 + rng.below(8); ++i) {
      ReplicateItem it{"it\"em, " + std::to_string(i), {}};
      for (std::size_t k = 0; k < 1 + rng.below(5); ++k)
        it.samples.push_back(rng.normal() * std::pow(10.0, double(rng.below(40)) - 20));
      r.items.push_back(std::move(it));
    }
    std::stringstream s1;
    write_replicates(s1, r);
    EXPECT_EQ(parse_replicates(s1), r);

    TwoClass tc;
    const std::size_t m = 2 + rng.below(6), p = 1 + rng.below(5);
    for (std::size_t i = 0; i < m; ++i) tc.labels.push_back(i % 2);
    for (std::size_t j = 0; j < p; ++j) tc.item_ids.push_back(" g" + std::to_string(j) + " ");
    for (std::size_t k = 0; k < m * p; ++k) tc.values.push_back(rng.normal() / 3.0);
    std::stringstream s2;
    write_twoclass(s2, tc);
    EXPECT_EQ(parse_twoclass(s2), tc);

    Binomial b;
    for (std::size_t i = 0; i < 1 + rng.below(6); ++i) {
      const std::uint64_t trials = 1 + rng.below(1000);
      b.items.push_back({"s" + std::to_string(i), rng.below(trials + 1), trials});
    }
    std::stringstream s3;
    write_binomial(s3, b);
    EXPECT_EQ(parse_binomial(s3), b);
  }
}

TEST(CsvTable, RoundTrip) {
  CsvTable t;
  t.header = {"a", "b,c"};
  t.rows = {{"1", "x\"y"}, {format_real(0.1), format_real(NAN)}};
  std::stringstream s;
  t.write(s);
  EXPECT_EQ(CsvTable::read(s), t);
  EXPECT_EQ(std::stod(format_real(0.1)), 0.1);
  EXPECT_EQ(format_real(-INFINITY), "-inf");
}

TEST(ParseReplicates, MillionRows) {
  const auto dir = testkit::scratch_dir("million");
  const auto path = dir / "big.csv";
  {
    std::ofstream f(path);
    f << "item,value\n";
    for (int i = 0; i < 1000000; ++i) f << "item" << (i % 250) << ',' << (i % 977) * 0.5 << '\n';
  }
  const auto ds = parse_replicates(path);
  EXPECT_EQ(ds.items.size(), 250u);
  for (const auto& it : ds.items) EXPECT_EQ(it.samples.size(), 4000u);
  std::filesystem::remove_all(dir);
}

TEST(ParseFiles, MissingFile) {
  EXPECT_THROW(parse_binomial(std::filesystem::path("/nonexistent/x.csv")), ParseError);
}
