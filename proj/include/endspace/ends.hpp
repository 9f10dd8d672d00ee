#ifndef ENDSPACE_ENDS_HPP
#define ENDSPACE_ENDS_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "endspace/quotient.hpp"

namespace endspace {

/// An edge-end at finite resolution: one side per cut, a ray-prefix
/// witness extendable at the frontier, and the component the end lives
/// in for each cut.
struct EndDescriptor {
  std::vector<FiniteCut> resolution;         // canonical order
  std::string sides;                         // 'A'/'B' per cut
  std::vector<std::string> ray_prefix;       // vertex ids, length >= threshold
  std::vector<ComponentId> home_components;  // per cut
};

bool operator==(const EndDescriptor& a, const EndDescriptor& b);

struct EndDetection {
  std::vector<EndDescriptor> ends;  // sorted by side pattern
  bool incomplete = false;
  int level_used = 0;
};

EndDetection detect_ends(const GraphPresentation& pres,
                         std::vector<FiniteCut> resolution, int level_budget,
                         int threshold = 8);

// ---------------------------------------------------------------------------
// star-comb search
// ---------------------------------------------------------------------------

struct CombWitness {
  std::vector<std::string> spine;               // path ending at the frontier
  std::vector<std::vector<std::string>> teeth;  // first vertex on the spine
};

struct StarWitness {
  std::string center;
  std::vector<std::vector<std::string>> leaf_paths;  // center first
};

struct WitnessResult {
  enum Kind { Comb, Star, Undetermined } kind = Undetermined;
  CombWitness comb;
  StarWitness star;
};

/// For an infinite vertex set U, find either a comb with at least
/// `threshold` teeth in U or a star with that many leaves in U.
WitnessResult find_star_or_comb(const GraphPresentation& pres,
                                const std::function<bool(const std::string&)>& in_u,
                                int level_budget, int threshold = 8);

// ---------------------------------------------------------------------------
// sides of ends, separation, classes
// ---------------------------------------------------------------------------

/// Side of the cut containing a tail of the end's rays; nullopt when the
/// side cannot be settled within the budget.
std::optional<Side> side_of_end(const GraphPresentation& pres,
                                const FiniteCut& cut, const EndDescriptor& end,
                                int level_budget);

using Point = std::variant<std::string, EndDescriptor>;

std::optional<bool> separates(const GraphPresentation& pres,
                              const FiniteCut& cut, const Point& p,
                              const Point& q, int level_budget);

struct ITopClass {
  std::string pattern;                // shared side string
  std::vector<std::string> vertices;  // ascending creation order
  std::vector<int> end_indices;       // into the detection list
  bool tentative = false;
};

struct ClassesResult {
  std::vector<ITopClass> classes;  // sorted by pattern
  EndDetection detection;
  int explored_level = 0;
};

/// Partition of the explored vertices and detected ends into maximal
/// groups inseparable by the resolution cuts.
ClassesResult itop_classes(const GraphPresentation& pres,
                           std::vector<FiniteCut> resolution, int level_budget,
                           int threshold = 8);

/// Resolution-relative domination: the vertex shares the end's side for
/// every cut of the end's resolution.
bool dominates(const GraphPresentation& pres, const std::string& vertex_id,
               const EndDescriptor& end);

// ---------------------------------------------------------------------------
// basic closed sets
// ---------------------------------------------------------------------------

struct ClosedMember {
  FiniteCut cut;
  ComponentId component;
};

struct IntersectionResult {
  enum Status { Witness, Empty, Undetermined } status = Undetermined;
  std::optional<Point> witness;
  std::vector<int> certificate;  // member indices of an empty subfamily
};

/// Desk-scale finite-intersection check over closures of components:
/// returns a common point (end preferred) or an empty subfamily.
IntersectionResult intersect_basic_closed(const GraphPresentation& pres,
                                          const std::vector<ClosedMember>& members,
                                          int level_budget);

/// Word containing the end in a quotient (defined whenever every cut
/// side is determined).
std::string word_of_end(const GraphPresentation& pres, const QuotientGraph& q,
                        const EndDescriptor& end);

}  // namespace endspace

#endif
