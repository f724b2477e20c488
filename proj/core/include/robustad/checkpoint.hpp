#pragma once

#include <filesystem>
#include <iosfwd>

#include "robustad/dae.hpp"

namespace robustad::models {

/// Binary checkpoint of a fitted DaeDetector, format version 1.
///
/// Little-endian layout:
///   magic "RADCKPT\0" | u32 version
///   encoder spec | decoder spec            (u32 n, n x u64 sizes, u8 hidden, u8 output)
///   f64 lambda | u8 center mode | u64 epochs | u64 batch size | f64 lr, beta1, beta2, eps
///   u64 latent dim | latent dim x f64 center
///   encoder blocks | decoder blocks        (per layer: weights row-major then bias, all f64)
///
/// Doubles are stored as their IEEE-754 bit patterns, so a reloaded model
/// scores bit-identically.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const DaeDetector& model, std::ostream& out);
void save_checkpoint(const DaeDetector& model, const std::filesystem::path& path);

DaeDetector load_checkpoint(std::istream& in);
DaeDetector load_checkpoint(const std::filesystem::path& path);

}  // namespace robustad::models
