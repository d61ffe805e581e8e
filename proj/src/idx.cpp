#include "fedssca/idx.hpp"

#include <fstream>
#include <iterator>
#include <vector>

namespace fedssca {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t offset) {
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void expect_header(const std::vector<unsigned char>& buf, std::size_t header_bytes, std::uint32_t magic,
                   const std::filesystem::path& path) {
  if (buf.size() < 4) throw IdxError(IdxErrorKind::truncated, path.string() + ": file shorter than magic word");
  const std::uint32_t got = be32(buf, 0);
  if (got != magic) {
    throw IdxError(IdxErrorKind::bad_magic, path.string() + ": bad magic " + std::to_string(got) +
                                                ", expected " + std::to_string(magic));
  }
  if (buf.size() < header_bytes) throw IdxError(IdxErrorKind::truncated, path.string() + ": truncated header");
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::size_t num_classes, std::size_t limit) {
  const auto images = read_file(images_path);
  expect_header(images, 16, kIdxImagesMagic, images_path);
  const std::size_t n_images = be32(images, 4);
  const std::size_t features = std::size_t{be32(images, 8)} * be32(images, 12);
  if (images.size() - 16 < n_images * features) {
    throw IdxError(IdxErrorKind::truncated, images_path.string() + ": " + std::to_string(n_images) +
                                                " images declared but pixel data is short");
  }

  const auto labels = read_file(labels_path);
  expect_header(labels, 8, kIdxLabelsMagic, labels_path);
  const std::size_t n_labels = be32(labels, 4);
  if (labels.size() - 8 < n_labels) {
    throw IdxError(IdxErrorKind::truncated, labels_path.string() + ": " + std::to_string(n_labels) +
                                                " labels declared but data is short");
  }
  if (n_images != n_labels) {
    throw IdxError(IdxErrorKind::count_mismatch, std::to_string(n_images) + " images but " +
                                                     std::to_string(n_labels) + " labels");
  }

  const std::size_t n = limit > 0 ? std::min(limit, n_images) : n_images;
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* px = images.data() + 16 + i * features;
    for (std::size_t k = 0; k < features; ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = static_cast<double>(px[k]) / 255.0;
    }
    const unsigned label = labels[8 + i];
    if (label >= num_classes) {
      throw IdxError(IdxErrorKind::bad_label, labels_path.string() + ": label " + std::to_string(label) +
                                                  " at index " + std::to_string(i) + " outside [0, " +
                                                  std::to_string(num_classes) + ")");
    }
    y[i] = static_cast<int>(label);
  }
  return Dataset(std::move(x), std::move(y), num_classes);
}

}  // namespace fedssca
