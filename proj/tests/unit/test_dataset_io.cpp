#include <doctest.h>

#include "bgcwm/dataset_io.hpp"
#include "bgcwm/error.hpp"
#include "tmpdir.hpp"

using namespace bgcwm;

TEST_CASE("reads response, covariates and labels by header") {
  testutil::TempDir dir("dataset");
  testutil::write_text(dir / "d.csv", "x1,y,x2,label\n1.5,2,3,1\n-1,0.25,4e-1,2\n");
  const Dataset d = read_dataset_csv(dir / "d.csv");
  CHECK(d.n() == 2);
  CHECK(d.p() == 2);
  CHECK(d.y[0] == 2.0);
  CHECK(d.X(1, 0) == -1.0);
  CHECK(d.X(1, 1) == 0.4);
  CHECK(d.labels == std::vector<int>{1, 2});
}

TEST_CASE("round trip keeps every bit") {
  testutil::TempDir dir("dataset");
  Dataset d;
  d.y = arma::vec{0.1, 1.0 / 3.0, -2.5e-300};
  d.X = arma::mat{{M_PI, 1e300}, {-0.0, 7.0}, {1e-5, 2.0 / 7.0}};
  d.labels = {1, 1, 2};
  write_dataset_csv(dir / "d.csv", d);
  const Dataset back = read_dataset_csv(dir / "d.csv");
  CHECK(arma::approx_equal(back.y, d.y, "absdiff", 0.0));
  CHECK(arma::approx_equal(back.X, d.X, "absdiff", 0.0));
  CHECK(back.labels == d.labels);
}

TEST_CASE("malformed files are rejected") {
  testutil::TempDir dir("dataset");
  auto io_error = [&](const std::string& text) {
    testutil::write_text(dir / "bad.csv", text);
    try {
      read_dataset_csv(dir / "bad.csv");
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Io || e.kind() == ErrorKind::InvalidArgument;
    }
    return false;
  };
  CHECK(io_error("x1,x2\n1,2\n"));
  CHECK(io_error("y,x1\n1,abc\n"));
  CHECK(io_error("y,x1\n1,2,3\n"));
  CHECK(io_error("y,x1,label\n1,2,1.5\n"));
  CHECK(io_error("y,x1\n"));
  CHECK(io_error("y\n1\n"));
  CHECK(io_error("y,x1\n1,nan\n"));
  CHECK_THROWS_AS(read_dataset_csv(dir / "missing.csv"), Error);
}
