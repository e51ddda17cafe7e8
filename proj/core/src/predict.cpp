#include "kmgr/train/predict.hpp"

#include "kmgr/audio/ops.hpp"
#include "kmgr/dsp/mfcc.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::train {

ClipPrediction predict_clip(nn::Model<float>& model, const audio::AudioClip& clip,
                            std::size_t num_segments, const dsp::DspConfig& cfg) {
  if (num_segments == 0) throw DataError("predict: need at least one segment");
  audio::AudioClip resampled =
      clip.sample_rate == cfg.sample_rate ? clip : audio::resample(clip, cfg.sample_rate);
  const std::vector<audio::AudioClip> segments = audio::segment_clip(resampled, num_segments);

  const std::size_t sample_len = nn::Tensor<float>::count(model.input_shape);
  std::vector<std::size_t> shape;
  shape.push_back(segments.size());
  shape.insert(shape.end(), model.input_shape.begin(), model.input_shape.end());
  nn::Tensor<float> batch(std::move(shape));

  for (std::size_t s = 0; s < segments.size(); ++s) {
    const dsp::MfccMatrix features = dsp::mfcc(segments[s], cfg);
    if (features.values.size() != sample_len)
      throw DataError("predict: segment features " + std::to_string(features.rows) + "x" +
                      std::to_string(features.cols) + " do not match model input " +
                      nn::shape_str(model.input_shape));
    for (std::size_t i = 0; i < sample_len; ++i)
      batch.data[s * sample_len + i] = static_cast<float>(features.values[i]);
  }

  const nn::Tensor<float> probs = model.forward(batch, nn::Mode::Infer);
  const std::size_t C = model.num_classes;
  ClipPrediction out;
  out.probabilities.assign(C, 0.0);
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (std::size_t c = 0; c < C; ++c)
      out.probabilities[c] += static_cast<double>(probs.data[s * C + c]);
  for (double& p : out.probabilities) p /= static_cast<double>(segments.size());

  out.genre_index = 0;
  for (std::size_t c = 1; c < C; ++c)
    if (out.probabilities[c] > out.probabilities[out.genre_index])
      out.genre_index = static_cast<std::uint32_t>(c);
  return out;
}

}  // namespace kmgr::train
