#ifndef NESTDYN_HIERARCHY_HPP
#define NESTDYN_HIERARCHY_HPP

#include <string>
#include <vector>

#include "nestdyn/errors.hpp"

namespace nestdyn {

// Finite action set. Actions are indices 0..n-1; labels are optional
// display names used by the CLI.
struct ActionSet {
  int n = 0;
  std::vector<std::string> labels;

  static ActionSet make(int n, std::vector<std::string> labels = {});
};

// Handle for a similarity class: a (level, index-within-level) pair.
// The level is part of the identity, so the same member set appearing at
// two levels yields two distinct classes.
struct ClassId {
  int level = 0;
  int index = 0;

  friend bool operator==(const ClassId&, const ClassId&) = default;
};

// A tower of nested partitions of {0,...,n-1}: level 0 is the single
// all-actions class, level N the singletons, and each level refines the
// previous one. Immutable after construction; all queries are pure.
class SimilarityTree {
 public:
  // `levels` holds one partition per level, each class a list of action
  // indices. Accepts either the interior levels 1..N-1 only (the trivial
  // level and the singleton level are synthesized) or the full 0..N tower.
  static SimilarityTree build(int n,
                              const std::vector<std::vector<std::vector<int>>>& levels);

  int num_actions() const { return n_; }

  // Number of nontrivial refinement steps N; levels run 0..N.
  int depth() const { return depth_; }

  int num_classes(int level) const;

  // The unique class of the level-`level` partition containing `action`.
  ClassId ancestor(int action, int level) const;

  // Finest level (in 0..N-1) at which a and b share a class. For a == b the
  // shared-ancestor condition holds at every level, but the range of the
  // definition stops at N-1, so degree(a, a) == N-1; no dynamics formula
  // ever evaluates the diagonal.
  int degree(int a, int b) const;

  // Sorted member actions of a class.
  const std::vector<int>& class_members(ClassId c) const;

  // Chain of classes from the root down to c; length c.level + 1.
  std::vector<ClassId> lineage(ClassId c) const;

  ClassId parent(ClassId c) const;

  ClassId root() const { return {0, 0}; }

  // Index of the class containing `action` at each level (size N+1); row
  // layout used by the hot loops in the dynamics module.
  const std::vector<int>& class_index_of(int action) const;

  // Partition of a given level as index lists, in deterministic order.
  const std::vector<std::vector<int>>& partition(int level) const;

 private:
  SimilarityTree() = default;

  void check_class(ClassId c) const;

  int n_ = 0;
  int depth_ = 0;
  // members_[level][class] = sorted action indices
  std::vector<std::vector<std::vector<int>>> members_;
  // parent_[level][class] = class index at level-1 (levels >= 1)
  std::vector<std::vector<int>> parent_;
  // class_of_[action][level] = class index at that level
  std::vector<std::vector<int>> class_of_;
};

}  // namespace nestdyn

#endif  // NESTDYN_HIERARCHY_HPP
