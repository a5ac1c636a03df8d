#pragma once

#include <filesystem>
#include <iosfwd>

#include "stea/kg.hpp"
#include "stea/sim_matrix.hpp"

namespace stea {

// Similarity exchange files, for plugging in scores from external models.
//
// Text layout (UTF-8, tab separated):
//
//   #stea-sim 1
//   direction<TAB>source->target | target->source
//   rows<TAB><number of row-KG entities>
//   cols<TAB><number of column-KG entities>
//   layout<TAB>dense | topk
//   fill<TAB><score for unlisted columns>          (topk only)
//   <row label><TAB><s_0><TAB>...<TAB><s_{cols-1}>  (dense; columns in
//                                                   column-KG id order)
//   <row label>(<TAB><col label><TAB><score>)*     (topk)
//
// Each row entity appears exactly once, in any order. The row KG is the
// direction's source.
//
// Binary layout (little endian):
//   "STEASIM1", u8 direction (0 = source->target), u8 layout (0 dense, 1 topk),
//   u64 rows, u64 cols, f64 fill, then rows in id order:
//   dense: cols x f64; topk: u32 count, count x (u32 column id, f64 score).
enum class SimFileFormat { Text, Binary };

void write_sim_matrix(std::ostream& out, const SimMatrix& m, const KgPair& pair,
                      SimFileFormat format);
void write_sim_matrix(const std::filesystem::path& path, const SimMatrix& m, const KgPair& pair,
                      SimFileFormat format);

// Detects the format from the leading bytes. Row and column counts must
// match the KGs of `pair`; text labels must resolve in them.
SimMatrix read_sim_matrix(std::istream& in, const KgPair& pair, const std::string& origin);
SimMatrix read_sim_matrix(const std::filesystem::path& path, const KgPair& pair);

}  // namespace stea
