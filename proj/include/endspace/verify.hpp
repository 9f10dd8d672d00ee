#ifndef ENDSPACE_VERIFY_HPP
#define ENDSPACE_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "endspace/contraction.hpp"
#include "endspace/ends.hpp"
#include "endspace/tree.hpp"

namespace endspace {

inline constexpr const char* kToolVersion = "endspace 0.1.0";

struct RunConfig {
  int level_budget = 16;
  int cut_size_budget = 2;
  int witness_threshold = 8;
  int law_cut_cap = 8;  // cuts drawn into the per-run law checks
  std::string cache_dir;
  enum Format { Json, Dot, Text } output_format = Json;
};

/// Apply ENDSPACE_LEVEL and ENDSPACE_CACHE_DIR on top of the defaults.
RunConfig config_from_env(RunConfig base = {});

/// Accepts a preset name, "file:<path>", or a path ending in .igp.
GraphPresentation load_presentation(const std::string& source);

struct VerifyResult {
  int exit_code = 0;  // 0 pass, 1 law violation (2 = errors, via exceptions)
  std::string report_json;
};

VerifyResult run_verify(const std::string& source, const RunConfig& config);

// ---------------------------------------------------------------------------
// exhaustive law checkers (shared by run_verify and the acceptance suite)
// ---------------------------------------------------------------------------

/// Self-inverse, identity, commutativity and associativity of the cut
/// sum, plus side-agreement revalidation of every pairwise sum.
CheckReport check_gf2_laws(const GraphPresentation& pres,
                           const std::vector<FiniteCut>& cuts,
                           int level_budget);

/// Projection laws over every subfamily of at most three cuts:
/// realized-word surjectivity (ends included) and edge identity.
CheckReport check_projection_laws(const GraphPresentation& pres,
                                  const std::vector<FiniteCut>& cuts, int level,
                                  const std::vector<EndDescriptor>& ends);

/// Triangle law plus projection compatibility over all nested chains
/// with at most three cuts on top.
CheckReport check_chain_laws(const GraphPresentation& pres,
                             const std::vector<FiniteCut>& cuts, int level,
                             const std::vector<EndDescriptor>& ends);

/// Bonding composition over nested triples of cut unions (at most four
/// edges each).
CheckReport check_bond_laws(const GraphPresentation& pres,
                            const std::vector<FiniteCut>& cuts,
                            int level_budget);

/// Comparison squares over nested pairs of cut unions.
CheckReport check_square_laws(const GraphPresentation& pres,
                              const std::vector<FiniteCut>& cuts,
                              int level_budget);

/// Unions of up to `arity` cuts, capped at `max_edges` edges, restricted
/// to those whose removal stabilizes. Sorted, deduplicated.
std::vector<std::vector<std::string>> cut_union_universe(
    const GraphPresentation& pres, const std::vector<FiniteCut>& cuts,
    int arity, int max_edges, int level_budget);

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string cut_to_json(const FiniteCut& cut);
std::string cuts_to_json(const CutEnumeration& enumeration);
std::string quotient_to_json(const QuotientGraph& q);
std::string contraction_to_json(const ContractionGraph& g);
std::string detection_to_json(const EndDetection& det);
std::string classes_to_json(const ClassesResult& classes);
std::string tower_report_to_json(const GraphPresentation& pres,
                                 const TreeTower& tower);
std::string presentation_to_json(const GraphPresentation& pres);

// ---------------------------------------------------------------------------
// result cache: content-addressed, atomic write-then-rename
// ---------------------------------------------------------------------------

std::string cache_key(const std::vector<std::string>& parts);
std::optional<std::string> cache_get(const std::string& dir,
                                     const std::string& key);
void cache_put(const std::string& dir, const std::string& key,
               const std::string& value);

}  // namespace endspace

#endif
