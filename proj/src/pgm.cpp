#include "polysr/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

namespace polysr {

namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_header_int(std::istream& in, const std::string& what, const std::filesystem::path& path) {
  skip_space_and_comments(in);
  long v = -1;
  if (!(in >> v) || v < 0) throw MalformedImage(path.string() + ": bad " + what);
  return v;
}

}  // namespace

ImageGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path.string());

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] < '2' || magic[1] > '6' || magic[1] == '4')
    throw MalformedImage(path.string() + ": not a P2/P3/P5/P6 image");
  const bool binary = magic[1] >= '5';
  const int channels = (magic[1] == '3' || magic[1] == '6') ? 3 : 1;

  const long cols = read_header_int(in, "width", path);
  const long rows = read_header_int(in, "height", path);
  const long maxval = read_header_int(in, "maxval", path);
  if (cols == 0 || rows == 0 || maxval == 0 || maxval > 65535)
    throw MalformedImage(path.string() + ": unsupported header values");

  const auto n = static_cast<std::size_t>(rows * cols * channels);
  std::vector<unsigned> samples(n);
  if (binary) {
    in.get();  // single whitespace byte after maxval
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::string raw(n * bytes, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw MalformedImage(path.string() + ": truncated");
    for (std::size_t k = 0; k < n; ++k) {
      unsigned v = static_cast<unsigned char>(raw[k * bytes]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(raw[k * bytes + 1]);
      samples[k] = v;
    }
  } else {
    for (auto& v : samples) {
      skip_space_and_comments(in);
      long x = -1;
      if (!(in >> x) || x < 0) throw MalformedImage(path.string() + ": bad sample");
      v = static_cast<unsigned>(std::min(x, 65536L));
    }
  }
  if (std::any_of(samples.begin(), samples.end(), [&](unsigned v) { return v > static_cast<unsigned>(maxval); }))
    throw MalformedImage(path.string() + ": sample exceeds maxval");

  ImageGrid img(static_cast<int>(rows), static_cast<int>(cols));
  const double scale = 1.0 / static_cast<double>(maxval);
  for (Eigen::Index k = 0; k < img.size(); ++k) {
    const auto base = static_cast<std::size_t>(k) * static_cast<std::size_t>(channels);
    // colour is reduced to Rec. 601 luma
    img.data()[k] = channels == 1 ? samples[base] * scale
                                  : (0.299 * samples[base] + 0.587 * samples[base + 1] + 0.114 * samples[base + 2]) * scale;
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& img, int maxval, PgmEncoding encoding) {
  if (maxval < 1 || maxval > 65535) throw InvalidArgument("maxval must be in [1, 65535]");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot write " + path.string());

  const bool binary = encoding == PgmEncoding::Binary;
  out << (binary ? "P5" : "P2") << '\n' << img.cols() << ' ' << img.rows() << '\n' << maxval << '\n';

  auto quantize = [maxval](double v) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    return static_cast<unsigned>(std::lround(c * maxval));
  };

  if (binary) {
    std::string raw;
    raw.reserve(static_cast<std::size_t>(img.size()) * 2);
    for (Eigen::Index k = 0; k < img.size(); ++k) {
      const unsigned q = quantize(img.data()[k]);
      if (maxval > 255) raw.push_back(static_cast<char>(q >> 8));
      raw.push_back(static_cast<char>(q & 0xff));
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  } else {
    for (int i = 0; i < img.rows(); ++i) {
      for (int j = 0; j < img.cols(); ++j) out << (j ? " " : "") << quantize(img(i, j));
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace polysr
