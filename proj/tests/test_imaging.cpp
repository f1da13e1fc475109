#include <doctest.h>

#include <random>

#include "polysr/imaging.hpp"

using namespace polysr;

namespace {

ImageGrid random_image(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageGrid img(rows, cols);
  for (Eigen::Index k = 0; k < img.size(); ++k) img.data()[k] = u(rng);
  return img;
}

}  // namespace

TEST_CASE("pack is row-major") {
  ImageGrid a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  CHECK(pack(a) == Eigen::Vector4d(1, 2, 3, 4));

  ImageGrid b(1, 3);
  b(0, 0) = 5;
  b(0, 1) = 6;
  b(0, 2) = 7;
  CHECK(pack(b) == Eigen::Vector3d(5, 6, 7));
}

TEST_CASE("unpack") {
  const ImageGrid a = unpack(Eigen::Vector4d(1, 2, 3, 4), 2, 2);
  CHECK(a(0, 1) == 2);
  CHECK(a(1, 0) == 3);
  const ImageGrid b = unpack(Eigen::Vector3d(5, 6, 7), 1, 3);
  CHECK(b(0, 2) == 7);
  Eigen::VectorXd six(6);
  six << 1, 2, 3, 4, 5, 6;
  CHECK_THROWS_AS(unpack(six, 4, 2), DimensionMismatch);
}

TEST_CASE("pack/unpack round trip is bit-exact") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 17);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageGrid img = random_image(dim(rng), dim(rng), rng);
    CHECK(unpack(pack(img), img.rows(), img.cols()) == img);
  }
}

TEST_CASE("upscale") {
  SUBCASE("constants are preserved exactly") {
    for (double z : {1.0, 1.8, 2.0, 3.0, 5.0}) {
      const ImageGrid up = upscale(ImageGrid(5, 7, 0.3), z);
      CHECK(up.rows() == scaled_extent(5, z));
      CHECK(up.cols() == scaled_extent(7, z));
      CHECK((up.data().array() == 0.3).all());
    }
  }
  SUBCASE("unit zoom is the identity") {
    std::mt19937_64 rng(2);
    const ImageGrid img = random_image(6, 4, rng);
    CHECK(upscale(img, 1.0) == img);
  }
  SUBCASE("no overshoot") {
    ImageGrid ramp(2, 2);
    ramp(0, 0) = 0.0;
    ramp(0, 1) = 0.25;
    ramp(1, 0) = 0.5;
    ramp(1, 1) = 1.0;
    const ImageGrid up = upscale(ramp, 2.0);
    CHECK(up.rows() == 4);
    CHECK(up.data().minCoeff() >= 0.0);
    CHECK(up.data().maxCoeff() <= 1.0);
    CHECK(up(1, 1) == doctest::Approx(0.4375));  // centre of the four samples
  }
  SUBCASE("rounding of non-integer extents") {
    CHECK(scaled_extent(5, 1.8) == 9);
    CHECK(scaled_extent(3, 2.5) == 8);  // 7.5 rounds up
  }
}

TEST_CASE("average_frames") {
  const Homographyd id = Homographyd::identity();
  std::mt19937_64 rng(3);
  const ImageGrid f = random_image(6, 6, rng);

  SUBCASE("single frame is its upscale") {
    CHECK(average_frames(FrameSet{{f}, {id}}, 2.0) == upscale(f, 2.0));
  }
  SUBCASE("identical frames") {
    CHECK(average_frames(FrameSet{{f, f}, {id, id}}, 2.0) == upscale(f, 2.0));
  }
  SUBCASE("arithmetic mean of constants") {
    const ImageGrid avg = average_frames(FrameSet{{ImageGrid(6, 6, 0.2), ImageGrid(6, 6, 0.6)}, {id, id}}, 2.0);
    for (Eigen::Index k = 0; k < avg.size(); ++k) CHECK(avg.data()[k] == doctest::Approx(0.4).epsilon(1e-15));
  }
  SUBCASE("shifted frames stay within the input range") {
    const ImageGrid g = random_image(6, 6, rng);
    const ImageGrid avg = average_frames(FrameSet{{f, g}, {id, Homographyd::translation(0.4, -0.3)}}, 2.0);
    const double lo = std::min(f.data().minCoeff(), g.data().minCoeff());
    const double hi = std::max(f.data().maxCoeff(), g.data().maxCoeff());
    CHECK(avg.data().minCoeff() >= lo);
    CHECK(avg.data().maxCoeff() <= hi);
  }
  SUBCASE("a shifted frame samples the matching reference location") {
    // Frame 1 is frame 0 shifted right by one pixel: pixel (i, j) of frame 1
    // sees what pixel (i, j + 1) of frame 0 sees.
    ImageGrid shifted(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) shifted(i, j) = f(i, std::min(j + 1, 5));
    const ImageGrid avg = average_frames(FrameSet{{f, shifted}, {id, Homographyd::translation(1, 0)}}, 1.0);
    for (int i = 0; i < 6; ++i)
      for (int j = 1; j < 5; ++j) CHECK(avg(i, j) == doctest::Approx(f(i, j)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(average_frames(FrameSet{}, 2.0), EmptyFrameSet);
    CHECK_THROWS_AS(average_frames(FrameSet{{f, ImageGrid(5, 6)}, {id, id}}, 2.0), InconsistentDimensions);
    CHECK_THROWS_AS(average_frames(FrameSet{{f}, {Homographyd::translation(1, 0)}}, 2.0), MalformedHomography);
  }
}
