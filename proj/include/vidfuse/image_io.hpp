#pragma once

#include "vidfuse/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vidfuse {

/// round(0.299 R + 0.587 G + 0.114 B)
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Reads an 8-bit PNG, PGM (P2/P5) or PPM (P3/P6) as grayscale; colour
/// images go through `luma`. Throws DataError on unreadable input.
ByteImage read_gray_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const ByteImage& img);
void write_png(const std::filesystem::path& path, const ByteImage& img);

/// Picks PGM or PNG from the file extension.
void write_gray_image(const std::filesystem::path& path, const ByteImage& img);

bool is_supported_image(const std::filesystem::path& path);

/// Loads every supported image in `dir`, ordered lexicographically by file
/// name (so names must be zero-padded), as frames 1..N.
std::vector<Frame> ingest_frame_sequence(const std::filesystem::path& dir);

/// Same ordering rule as ingest_frame_sequence, without decoding.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace vidfuse
