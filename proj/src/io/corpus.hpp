#pragma once

#include <string>
#include <vector>

#include "signal/recording.hpp"

namespace eegdiff {

// Corpus container format, little-endian:
//   magic "EEGC", u16 version = 1, u32 record count
//   per record: u32 subject, i32 label (-1 = none), f32 sample_rate,
//               u32 C, u32 L, C*L f32 samples
// Paired datasets append u32 H, u32 W and 3*H*W f32 image values per record.
// Plain and paired corpora share the header; the two loaders validate that
// the payload is consumed exactly, so a mismatched kind is rejected.

std::vector<uint8_t> encode_recordings(const std::vector<EegRecording>& recs);
std::vector<EegRecording> decode_recordings(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> encode_paired(const PairedDataset& ds);
PairedDataset decode_paired(const std::vector<uint8_t>& bytes);

void save_recordings(const std::string& path, const std::vector<EegRecording>& recs);
std::vector<EegRecording> load_recordings(const std::string& path);

void save_paired(const std::string& path, const PairedDataset& ds);
PairedDataset load_paired(const std::string& path);

} // namespace eegdiff
