#ifndef ENDSPACE_QUOTIENT_HPP
#define ENDSPACE_QUOTIENT_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "endspace/cutspace.hpp"

namespace endspace {

struct EndDescriptor;  // ends module

struct CheckReport {
  bool pass = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    pass = false;
    violations.push_back(std::move(what));
  }
  void merge(const CheckReport& other) {
    pass = pass && other.pass;
    violations.insert(violations.end(), other.violations.begin(),
                      other.violations.end());
  }
};

struct LoopRecord {
  int count_at_level = 0;
  bool unbounded = false;
};

struct CrossEdge {
  std::string edge;
  int word_a = 0;
  int word_b = 0;
};

/// Finite-vertex multigraph over a cut family: vertices are the realized
/// side words, cross edges join distinct words, remaining edges are kept
/// as per-word loop records.
struct QuotientGraph {
  std::vector<FiniteCut> cuts;  // canonical order
  int level_used = 0;
  std::shared_ptr<const Truncation> top;
  WordIndex index;  // oracles reference *top
  std::vector<CrossEdge> cross_edges;        // sorted by edge id
  std::vector<LoopRecord> loops;             // per word
  std::vector<std::string> word_fiber_rep;   // least fiber vertex per word

  const std::vector<std::string>& words() const { return index.patterns; }
  int word_count() const { return index.word_count(); }
};

int default_quotient_level(const GraphPresentation& pres,
                           const std::vector<FiniteCut>& cuts);

QuotientGraph build_quotient(const GraphPresentation& pres,
                             std::vector<FiniteCut> cuts, int level);

/// Same, reusing an already expanded truncation (must cover `level`).
QuotientGraph build_quotient(const GraphPresentation& pres,
                             std::vector<FiniteCut> cuts, int level,
                             std::shared_ptr<const Truncation> top);

/// Vertex clause of the projection: the unique word whose sides agree
/// with the vertex on every cut.
std::string quotient_word_of_vertex(const GraphPresentation& pres,
                                    const QuotientGraph& q,
                                    const std::string& vertex_id);

/// Edge clause of the projection: the identity.
std::string quotient_image_of_edge(const QuotientGraph& q,
                                   const std::string& edge_id);

/// Bonding map between quotients of nested cut families: coordinate
/// projection of words.
std::string project_word(const QuotientGraph& sup, const QuotientGraph& sub,
                         const std::string& word);

/// Triangle law for a nested chain plus projection-compatibility on all
/// truncation vertices and the supplied ends.
CheckReport verify_inverse_system(const GraphPresentation& pres,
                                  std::vector<FiniteCut> m1,
                                  std::vector<FiniteCut> m2,
                                  std::vector<FiniteCut> m3, int level,
                                  std::span<const EndDescriptor> ends = {});

std::string quotient_to_dot(const QuotientGraph& q);

}  // namespace endspace

#endif
