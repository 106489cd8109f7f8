#include "detraceval/mot_metrics.hpp"

#include <unordered_map>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"
#include "detraceval/matching.hpp"

namespace detraceval {

double mota_from_counts(long gt_total, long fn, long fp, long ids) {
  if (gt_total <= 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(fn + fp + ids) / static_cast<double>(gt_total));
}

MetricBundle make_bundle(std::span<const FrameCounts> frames, const TrackStats& tracks) {
  MetricBundle b;
  for (const auto& f : frames) {
    b.gt_total += f.gt;
    b.matches += f.matches;
    b.fp += f.fp;
    b.fn += f.fn;
    b.ids += f.ids;
    b.iou_sum += f.iou_sum;
  }
  b.mota = mota_from_counts(b.gt_total, b.fn, b.fp, b.ids);
  b.motp = b.matches > 0 ? 100.0 * b.iou_sum / static_cast<double>(b.matches) : 0.0;
  b.track_total = tracks.total;
  b.mt = tracks.mostly_tracked;
  b.ml = tracks.mostly_lost;
  b.fm = tracks.fragmentations;
  if (tracks.total > 0) {
    b.mt_percent = 100.0 * static_cast<double>(b.mt) / static_cast<double>(tracks.total);
    b.ml_percent = 100.0 * static_cast<double>(b.ml) / static_cast<double>(tracks.total);
  }
  return b;
}

SequenceClear evaluate_clear(const GroundTruth& gt, const TrackSet& tracks, const ClearConfig& config) {
  validate(tracks, gt.frame_count);
  const auto frames = static_cast<std::size_t>(gt.frame_count) + 1;

  // Per-frame evaluated GT boxes (id = track index) and hypotheses.
  std::vector<std::vector<IdentifiedBox>> gt_at(frames), hyp_at(frames);
  std::vector<long> evaluated(gt.tracks.size(), 0);
  for (std::size_t t = 0; t < gt.tracks.size(); ++t) {
    for (const auto& e : gt.tracks[t].entries) {
      if (config.exclude_truncated && e.truncated()) continue;
      if (ignore_coverage(e.box, gt.ignore_regions, e.frame) > kIgnoreCoverageThreshold) continue;
      gt_at[static_cast<std::size_t>(e.frame)].push_back({static_cast<int>(t), e.box});
      ++evaluated[t];
    }
  }
  for (const auto& track : tracks) {
    for (const auto& b : track.boxes) hyp_at[static_cast<std::size_t>(b.frame)].push_back({track.track_id, b.box});
  }

  SequenceClear result;
  result.sequence_id = gt.sequence_id;
  result.frames.reserve(frames - 1);

  constexpr int kNone = -1;
  std::vector<int> last_hyp(gt.tracks.size(), kNone);       // most recent matched hypothesis id
  std::vector<char> was_matched(gt.tracks.size(), 0);       // status at the previous evaluated frame
  std::vector<char> ever_matched(gt.tracks.size(), 0);
  std::vector<long> matched_frames(gt.tracks.size(), 0);
  long fragmentations = 0;
  std::vector<IdPair> prev;

  for (std::size_t f = 1; f < frames; ++f) {
    const auto& gts = gt_at[f];
    const auto& hyps = hyp_at[f];
    const FrameMatching m = clear_correspond(prev, gts, hyps, config.iou_thr);

    FrameCounts c;
    c.frame = static_cast<int>(f);
    c.gt = static_cast<long>(gts.size());
    c.matches = static_cast<long>(m.pairs.size());
    c.fn = static_cast<long>(m.unmatched_gt.size());
    for (int j : m.unmatched_hyp) {
      if (ignore_coverage(hyps[j].box, gt.ignore_regions, static_cast<int>(f)) <= kIgnoreCoverageThreshold) ++c.fp;
    }

    std::vector<char> matched_now(gts.size(), 0);
    for (const auto& p : m.pairs) {
      const int t = gts[p.gt].id;
      const int h = hyps[p.hyp].id;
      c.iou_sum += p.iou;
      matched_now[p.gt] = 1;
      if (last_hyp[t] != kNone && last_hyp[t] != h) ++c.ids;
      last_hyp[t] = h;
      if (ever_matched[t] && !was_matched[t]) ++fragmentations;
      ever_matched[t] = 1;
      ++matched_frames[t];
    }
    for (std::size_t i = 0; i < gts.size(); ++i) was_matched[gts[i].id] = matched_now[i];

    result.frames.push_back(c);
    prev = to_id_pairs(m, gts, hyps);
  }

  TrackStats& ts = result.tracks;
  ts.fragmentations = fragmentations;
  for (std::size_t t = 0; t < gt.tracks.size(); ++t) {
    if (evaluated[t] == 0) continue;
    ++ts.total;
    const double coverage = static_cast<double>(matched_frames[t]) / static_cast<double>(evaluated[t]);
    if (coverage > kMostlyTrackedRatio) {
      ++ts.mostly_tracked;
    } else if (coverage < kMostlyLostRatio) {
      ++ts.mostly_lost;
    } else {
      ++ts.partially_tracked;
    }
  }
  result.bundle = make_bundle(result.frames, ts);
  return result;
}

MetricBundle aggregate(std::span<const SequenceClear> sequences) {
  if (sequences.empty()) throw Error("aggregate: no sequences");
  std::vector<FrameCounts> frames;
  TrackStats ts;
  for (const auto& s : sequences) {
    frames.insert(frames.end(), s.frames.begin(), s.frames.end());
    ts.total += s.tracks.total;
    ts.mostly_tracked += s.tracks.mostly_tracked;
    ts.partially_tracked += s.tracks.partially_tracked;
    ts.mostly_lost += s.tracks.mostly_lost;
    ts.fragmentations += s.tracks.fragmentations;
  }
  return make_bundle(frames, ts);
}

}  // namespace detraceval
