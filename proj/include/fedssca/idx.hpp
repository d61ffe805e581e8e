#pragma once

// Reader for the IDX files the MNIST distribution ships in: a big-endian
// magic word (0x00000803 for uint8 images N x rows x cols, 0x00000801 for
// uint8 labels), big-endian uint32 dimensions, then raw bytes.

#include "fedssca/types.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace fedssca {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

enum class IdxErrorKind { io, bad_magic, truncated, count_mismatch, bad_label };

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  IdxErrorKind kind() const { return kind_; }

 private:
  IdxErrorKind kind_;
};

/// Pixels scaled to [0, 1] by 1/255; labels must lie in [0, num_classes).
/// `limit` > 0 keeps only the first `limit` samples.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::size_t num_classes = 10, std::size_t limit = 0);

}  // namespace fedssca
