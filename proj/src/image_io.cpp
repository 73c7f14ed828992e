#include "vidfuse/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace vidfuse {

namespace {

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Netpbm header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_positive(const std::string& tok, const fs::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw DataError(path.string() + ": bad netpbm header");
}

ByteImage read_netpbm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  const std::string magic = next_token(in);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (!(ascii || magic == "P5" || magic == "P6"))
    throw DataError(path.string() + ": unsupported netpbm type '" + magic + "'");
  const int w = parse_positive(next_token(in), path);
  const int h = parse_positive(next_token(in), path);
  const int maxval = parse_positive(next_token(in), path);
  if (maxval > 255) throw DataError(path.string() + ": only 8-bit images are supported");

  const int channels = color ? 3 : 1;
  std::vector<int> raw(static_cast<std::size_t>(w) * h * channels);
  if (ascii) {
    for (auto& v : raw) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw DataError(path.string() + ": truncated pixel data");
      v = std::stoi(tok);
    }
  } else {
    std::vector<unsigned char> bytes(raw.size());
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
      throw DataError(path.string() + ": truncated pixel data");
    std::copy(bytes.begin(), bytes.end(), raw.begin());
  }
  for (auto& v : raw) {
    if (v < 0 || v > maxval) throw DataError(path.string() + ": pixel exceeds maxval");
    if (maxval != 255) v = static_cast<int>(std::lround(v * 255.0 / maxval));
  }

  ByteImage img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const std::size_t i = (static_cast<std::size_t>(r) * w + c) * channels;
      img(r, c) = color ? luma(static_cast<std::uint8_t>(raw[i]), static_cast<std::uint8_t>(raw[i + 1]),
                               static_cast<std::uint8_t>(raw[i + 2]))
                        : static_cast<std::uint8_t>(raw[i]);
    }
  return img;
}

ByteImage read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw DataError(path.string() + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DataError(path.string() + ": only 8-bit images are supported");
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
    throw DataError(path.string() + ": " + image.message);

  const auto h = static_cast<Eigen::Index>(image.height);
  const auto w = static_cast<Eigen::Index>(image.width);
  ByteImage img(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) {
      if (color) {
        const png_byte* px = &buf[static_cast<std::size_t>((r * w + c) * 3)];
        img(r, c) = luma(px[0], px[1], px[2]);
      } else {
        img(r, c) = buf[static_cast<std::size_t>(r * w + c)];
      }
    }
  return img;
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
}

bool is_supported_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

ByteImage read_gray_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw DataError(path.string() + ": not a readable file");
  return lower_ext(path) == ".png" ? read_png(path) : read_netpbm(path);
}

void write_pgm(const fs::path& path, const ByteImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  // ByteImage is row-major, so the buffer is already in raster order.
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

void write_png(const fs::path& path, const ByteImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.cols());
  image.height = static_cast<png_uint_32>(img.rows());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data(), 0, nullptr))
    throw DataError(path.string() + ": " + image.message);
}

void write_gray_image(const fs::path& path, const ByteImage& img) {
  const std::string ext = lower_ext(path);
  if (ext == ".png")
    write_png(path, img);
  else if (ext == ".pgm")
    write_pgm(path, img);
  else
    throw UsageError(path.string() + ": output extension must be .pgm or .png");
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) throw DataError(dir.string() + ": no PNG/PGM/PPM frames found");
  return files;
}

std::vector<Frame> ingest_frame_sequence(const fs::path& dir) {
  std::vector<Frame> frames;
  int index = 1;
  for (const auto& file : list_frame_files(dir)) {
    Frame f{read_gray_image(file), index++};
    if (!frames.empty() &&
        (f.height() != frames.front().height() || f.width() != frames.front().width()))
      throw DataError(file.string() + ": dimensions " + std::to_string(f.width()) + "x" +
                      std::to_string(f.height()) + " differ from the first frame's " +
                      std::to_string(frames.front().width()) + "x" +
                      std::to_string(frames.front().height()));
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace vidfuse
