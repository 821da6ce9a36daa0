#pragma once

#include <filesystem>
#include <iosfwd>

#include "rcrank/ensemble.hpp"

namespace rcrank {

inline constexpr const char* kModelMagic = "RCRANK-MODEL";
inline constexpr int kModelVersion = 1;

/// Text model format (LF line endings):
///
///   RCRANK-MODEL 1
///   variant <oblivious|standard>
///   features <l>
///   metric ndcg@<k>
///   trees <T>
///   tree <t> weight <w> depth <D>                  (oblivious)
///   rule <level> <feature> <threshold>             (D lines)
///   leaves <v_0> ... <v_{2^D-1}>
///   tree <t> weight <w> nodes <N>                  (standard)
///   node <id> split <feature> <threshold> <left> <right>
///   node <id> leaf <value>
///
/// Reals use the shortest decimal that round-trips, so save/load/save is
/// byte-identical.
void save_model(const Ensemble& ensemble, std::ostream& out);
void save_model(const Ensemble& ensemble, const std::filesystem::path& path);

Ensemble load_model(std::istream& in);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace rcrank
