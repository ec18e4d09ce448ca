#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ctmboost/csv.hpp"

using namespace ctm;

namespace {

ErrorKind kind_of(const std::function<void()>& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::config;
}

std::string message_of(const std::function<void()>& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

}  // namespace

TEST_CASE("plain tables parse into header and rows") {
  const CsvTable t = parse_csv("a,b,c\n1,2,3\n4,5,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.n_rows() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
  CHECK(t.rows[1] == std::vector<std::string>{"4", "5", "6"});
  CHECK(t.column_index("b") == 1);
  CHECK(t.column_index("missing") == -1);
  CHECK(t.has_column("c"));

  // The trailing newline is optional and a header-only file has no rows.
  CHECK(parse_csv("a,b\n1,2").n_rows() == 1);
  CHECK(parse_csv("a,b\n").n_rows() == 0);
  CHECK(parse_csv("a,b").n_rows() == 0);
}

TEST_CASE("quoting covers commas, escaped quotes, and embedded newlines") {
  const CsvTable t =
      parse_csv("name,note\nx,\"a,b\"\ny,\"say \"\"hi\"\"\"\nz,\"two\nlines\"\n");
  REQUIRE(t.n_rows() == 3);
  CHECK(t.rows[0][1] == "a,b");
  CHECK(t.rows[1][1] == "say \"hi\"");
  CHECK(t.rows[2][1] == "two\nlines");
}

TEST_CASE("carriage returns before the newline are stripped") {
  const CsvTable t = parse_csv("a,b\r\n1,2\r\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.n_rows() == 1);
  CHECK(t.rows[0][1] == "2");
}

TEST_CASE("structural problems are parse errors that name the line") {
  CHECK(kind_of([] { parse_csv(""); }) == ErrorKind::parse);
  CHECK(message_of([] { parse_csv(""); }).find("header") != std::string::npos);

  CHECK(kind_of([] { parse_csv("a,b\n1\n"); }) == ErrorKind::parse);
  CHECK(message_of([] { parse_csv("a,b\n1,2,3\n"); }) ==
        "line 2 has 3 fields, expected 2");

  // A field spanning physical lines shifts the numbering of later rows.
  CHECK(message_of([] { parse_csv("a,b\nx,\"two\nlines\"\n1\n"); }) ==
        "line 4 has 1 fields, expected 2");

  CHECK(kind_of([] { parse_csv("a,b\n1,\"open\n"); }) == ErrorKind::parse);
  CHECK(message_of([] { parse_csv("a,b\n1,\"open\n"); }).find("line 2") !=
        std::string::npos);
}

TEST_CASE("csv_quote round-trips through the parser") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("two\nlines") == "\"two\nlines\"");

  const std::vector<std::string> nasty = {"plain", "a,b", "\"", "x\ny",
                                          "trailing,\"mix\"\nall"};
  std::string text = "v\n";
  for (const std::string& s : nasty) text += csv_quote(s) + "\n";
  const CsvTable t = parse_csv(text);
  REQUIRE(t.n_rows() == static_cast<Eigen::Index>(nasty.size()));
  for (std::size_t i = 0; i < nasty.size(); ++i) CHECK(t.rows[i][0] == nasty[i]);
}

TEST_CASE("parse_double accepts full numeric fields only") {
  double v = 0.0;
  CHECK(parse_double("1.5", &v));
  CHECK(v == 1.5);
  CHECK(parse_double("-2e3", &v));
  CHECK(v == -2000.0);
  CHECK_FALSE(parse_double("", &v));
  CHECK_FALSE(parse_double("12x", &v));
  CHECK_FALSE(parse_double("1.5 ", &v));
  CHECK_FALSE(parse_double("1e999", &v));  // overflow
}

TEST_CASE("text files round-trip and failures carry the io kind") {
  const std::string path = "/tmp/ctm_csv_roundtrip.txt";
  const std::string content = "line one\nline two\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);
  std::remove(path.c_str());

  CHECK(kind_of([] { read_text_file("/tmp/no/such/file.csv"); }) ==
        ErrorKind::io);
  CHECK(kind_of([] { write_text_file("/tmp/no/such/dir/out.csv", "x"); }) ==
        ErrorKind::io);
}

TEST_CASE("dataset extraction fills numeric, categorical, and weight columns") {
  const CsvTable t = parse_csv(
      "x,group,y,w\n"
      "0.5,a,1.25,2\n"
      "1.5,b,-0.5,1\n"
      "2.5,a,0,1\n");
  const std::vector<ColumnRequest> covariates = {{"x", false}, {"group", true}};
  const Dataset data = dataset_from_table(t, covariates, "y", "w");
  REQUIRE(data.n() == 3);
  CHECK(data.response_name == "y");
  CHECK(data.response[0] == 1.25);
  CHECK(data.response[2] == 0.0);
  CHECK(data.column("x").numeric[1] == 1.5);
  CHECK(data.column("group").categorical);
  CHECK(data.column("group").labels[1] == "b");
  CHECK(data.weights[0] == 2.0);
  CHECK(data.weights[2] == 1.0);
}

TEST_CASE("omitting response and weights yields defaults") {
  const CsvTable t = parse_csv("x\n1\n2\n");
  const Dataset data = dataset_from_table(t, {{"x", false}}, "", "");
  REQUIRE(data.n() == 2);
  CHECK(data.response[0] == 0.0);
  CHECK(data.response[1] == 0.0);
  // validate() fills uniform weights summing to one.
  CHECK(data.weights[0] == 0.5);
  CHECK(data.weights[1] == 0.5);
}

TEST_CASE("a column name that is not in the file is a configuration error") {
  const CsvTable t = parse_csv("x,y\n1,2\n");
  const auto missing_covariate = [&] {
    dataset_from_table(t, {{"z", false}}, "y", "");
  };
  CHECK(kind_of(missing_covariate) == ErrorKind::config);
  const std::string message = message_of(missing_covariate);
  CHECK(message.find("'z'") != std::string::npos);
  CHECK(message.find("covariate") != std::string::npos);
  CHECK(message.find("'x', 'y'") != std::string::npos);

  CHECK(kind_of([&] { dataset_from_table(t, {}, "resp", ""); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { dataset_from_table(t, {}, "y", "wt"); }) ==
        ErrorKind::config);
}

TEST_CASE("bad cells are data errors that name line and column") {
  const CsvTable t = parse_csv("x,y\n1,2\nfoo,3\n");
  const auto bad_cell = [&] { dataset_from_table(t, {{"x", false}}, "y", ""); };
  CHECK(kind_of(bad_cell) == ErrorKind::data);
  CHECK(message_of(bad_cell) ==
        "cannot parse 'foo' on line 3 in column 'x' as a number");

  const CsvTable missing = parse_csv("x,y\n1,\n");
  const auto empty_cell = [&] {
    dataset_from_table(missing, {{"x", false}}, "y", "");
  };
  CHECK(kind_of(empty_cell) == ErrorKind::data);
  CHECK(message_of(empty_cell) == "missing value on line 2 in column 'y'");

  const CsvTable blank_label = parse_csv("g,y\n,1\n");
  CHECK(kind_of([&] {
          dataset_from_table(blank_label, {{"g", true}}, "y", "");
        }) == ErrorKind::data);

  CHECK(kind_of([] {
          dataset_from_table(parse_csv("x,y\n"), {{"x", false}}, "y", "");
        }) == ErrorKind::data);

  // Values that parse to non-finite numbers are rejected by validation.
  const CsvTable nan_cell = parse_csv("x,y\nnan,1\n");
  CHECK(kind_of([&] {
          dataset_from_table(nan_cell, {{"x", false}}, "y", "");
        }) == ErrorKind::data);
}
