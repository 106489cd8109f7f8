#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "detraceval/datamodel.hpp"

namespace detraceval {

// Near-equal total overlaps closer than this are treated as ties.
inline constexpr double kTieTolerance = 1e-9;

struct MatchPair {
  int gt = -1;   // index into the frame's ground-truth boxes
  int hyp = -1;  // index into the frame's hypothesis boxes
  double iou = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct FrameMatching {
  std::vector<MatchPair> pairs;  // ordered by gt index
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_hyp;

  friend bool operator==(const FrameMatching&, const FrameMatching&) = default;
};

// A box carrying an identity that persists across frames (GT target index or
// hypothesis track id).
struct IdentifiedBox {
  int id = 0;
  BBox box;
};

struct IdPair {
  int gt_id = 0;
  int hyp_id = 0;

  friend bool operator==(const IdPair&, const IdPair&) = default;
};

// Greedy detection matching: detections in descending score order (input
// order among equal scores) each take the unmatched GT of largest IoU
// (lowest index among equal IoU) when that IoU reaches `iou_thr`.
FrameMatching match_frame_greedy(std::span<const Detection> dets, std::span<const BBox> gts, double iou_thr);

// Maximum-cardinality, maximum-total-IoU assignment restricted to entries
// >= iou_thr. Among optimal assignments (total within kTieTolerance) returns
// the one whose row->column vector is lexicographically smallest, with
// "unassigned" ordered after every column.
std::vector<int> max_overlap_assignment(const Eigen::MatrixXd& overlap, double iou_thr);

// CLEAR MOT correspondence for one frame. Previous pairs whose boxes are both
// present with IoU >= iou_thr are kept; the rest are matched with
// max_overlap_assignment.
FrameMatching clear_correspond(std::span<const IdPair> prev, std::span<const IdentifiedBox> gts,
                               std::span<const IdentifiedBox> hyps, double iou_thr);

std::vector<IdPair> to_id_pairs(const FrameMatching& m, std::span<const IdentifiedBox> gts,
                                std::span<const IdentifiedBox> hyps);

}  // namespace detraceval
