#pragma once

#include <map>
#include <string>
#include <vector>

#include "mallows/augmentation.hpp"
#include "mallows/dynamics.hpp"
#include "mallows/mixture.hpp"
#include "mallows/partition.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

// Rank matrix CSV: header row of item labels, one row per assessor, integer
// ranks with NA marking an unobserved entry. Validation errors name the row
// and offending value.
struct RankMatrixData {
  ItemCatalog items;
  std::vector<PartialRanking> rows;
};
RankMatrixData load_rank_matrix(const std::string& path);

// Fails if any row has missing entries.
std::vector<Ranking> complete_rows(const std::vector<PartialRanking>& rows);

void save_rank_matrix(const std::string& path, const std::vector<Ranking>& rows,
                      const ItemCatalog& items);

// Preference CSV: header assessor,less_preferred,more_preferred; one stated
// pair per row, items by label. Rows are grouped by assessor id and closed
// transitively; a cyclic assessor is rejected with the witness cycle spelled
// out. Without an explicit catalog the item set is the sorted set of labels
// seen in the file.
struct PreferenceData {
  ItemCatalog items;
  std::vector<PreferenceConstraintSet> assessors;
};
PreferenceData load_preferences(const std::string& path);
PreferenceData load_preferences(const std::string& path, const ItemCatalog& items);

// Timed CSV: header t,<item labels>; each row one observation at integer
// time t. Slices are normalized so the smallest t becomes slice 0; gaps
// stay as empty slices. Repeated rank values within a row turn it into a
// TieSet; NA is not allowed here.
struct TimedRankData {
  ItemCatalog items;
  TimedData data;
};
TimedRankData load_timed_ranks(const std::string& path);

// A one-row CSV (or one label per line) naming the full item set.
ItemCatalog load_item_list(const std::string& path);

std::vector<int> load_labels(const std::string& path);  // one integer per line, header optional

// Sample files: key=value header lines, a final columns= line, then one row
// per retained draw. Doubles are written with enough digits to reload
// bit-exactly. The `meta` map is merged into the header (sorted order);
// structural keys (kind, n, columns, ...) are set by the writer.
void save_static_samples(const std::string& path, const PosteriorSamples& samples,
                         const ItemCatalog& items,
                         const std::map<std::string, std::string>& meta = {});
void save_augmented_samples(const std::string& path, const std::vector<long>& iterations,
                            const std::vector<std::vector<Ranking>>& augmented,
                            const ItemCatalog& items,
                            const std::map<std::string, std::string>& meta = {});
void save_mixture_samples(const std::string& path, const MixtureSamples& samples,
                          const ItemCatalog& items,
                          const std::map<std::string, std::string>& meta = {});
void save_dynamic_samples(const std::string& path, const DynamicSamples& samples,
                          const ItemCatalog& items,
                          const std::map<std::string, std::string>& meta = {});

struct SampleFile {
  std::string kind;  // static | augmented | mixture | dynamic
  std::map<std::string, std::string> meta;
  ItemCatalog items;
  PosteriorSamples static_samples;
  std::vector<long> augmented_iterations;
  std::vector<std::vector<Ranking>> augmented;
  MixtureSamples mixture_samples;
  DynamicSamples dynamic_samples;
};
SampleFile load_samples(const std::string& path);

void save_partition_table(const std::string& path, const LogPartitionTable& table);
LogPartitionTable load_partition_table(const std::string& path);

// Manifest: enough to reproduce a run byte for byte. Holds the command, the
// resolved configuration, and the output file names; deliberately no
// directory paths, so a rerun into a fresh directory compares clean.
void save_manifest(const std::string& path, const std::string& command,
                   const std::map<std::string, std::string>& config,
                   const std::vector<std::string>& outputs);
struct Manifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<std::string> outputs;
};
Manifest load_manifest(const std::string& path);

std::string format_double(double v);  // shortest representation that reloads exactly

}  // namespace mallows
