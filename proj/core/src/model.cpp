#include "dswgan/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dswgan {

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& x) const {
  if (!enabled) return x;
  Eigen::MatrixXd z = x.rowwise() - mean.transpose();
  z.array().rowwise() /= stddev.transpose().array();
  return z;
}

Eigen::VectorXd Standardization::input_weights() const {
  if (!enabled) return Eigen::VectorXd();
  return stddev.cwiseInverse();
}

void DSWGANModel::validate() const {
  horizon.validate();
  generator.validate();
  discriminator.validate();
  const int pp = horizon.intervals;
  if (generator.output_dim() != pp)
    throw std::invalid_argument("DSWGANModel: generator output dim must equal p");
  if (generator.input_dim() != pp)
    throw std::invalid_argument("DSWGANModel: generator input dim must equal p");
  if (discriminator.input_dim() != pp || discriminator.output_dim() != 1)
    throw std::invalid_argument("DSWGANModel: discriminator must map p inputs to a scalar");
  if (!(lambda_min > 0.0)) throw std::invalid_argument("DSWGANModel: lambda_min must be > 0");
  if (standardize.enabled &&
      (standardize.mean.size() != pp || standardize.stddev.size() != pp))
    throw std::invalid_argument("DSWGANModel: standardization vectors must have length p");
}

IntensityVector simulate_intensity(const DSWGANModel& model, RngStream& stream) {
  const auto y = sample_uniform_vector(stream, model.p());
  const Eigen::VectorXd out =
      forward_value(model.generator, Eigen::Map<const Eigen::VectorXd>(y.data(), model.p()));
  IntensityVector rates(static_cast<std::size_t>(model.p()));
  for (int i = 0; i < model.p(); ++i) rates[static_cast<std::size_t>(i)] = std::max(out(i), model.lambda_min);
  return rates;
}

CountVector simulate_counts(const DSWGANModel& model, RngStream& stream) {
  const IntensityVector rates = simulate_intensity(model, stream);
  CountVector counts(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) counts[i] = sample_poisson(stream, rates[i]);
  return counts;
}

double surrogate_poisson_grad(double rate, std::int64_t count, double lambda_min, double lo,
                              double hi) {
  if (!(rate >= lambda_min))
    throw std::domain_error("surrogate_poisson_grad: rate below lambda_min; clamp upstream");
  const double g = 1.0 + (static_cast<double>(count) - rate) / (2.0 * rate);
  return std::min(std::max(g, lo), hi);
}

MLPGradients generator_grad(const DSWGANModel& model, const Eigen::MatrixXd& noise,
                            const Eigen::MatrixXd& counts,
                            const Eigen::MatrixXd& disc_input_grad, SurrogateStats* stats) {
  if (noise.rows() != counts.rows() || noise.rows() != disc_input_grad.rows() ||
      noise.cols() != model.p() || counts.cols() != model.p() ||
      disc_input_grad.cols() != model.p())
    throw std::invalid_argument("generator_grad: batch shape mismatch");

  const ForwardTrace trace = forward(model.generator, noise);
  const Eigen::MatrixXd& raw = trace.output();
  Eigen::MatrixXd upstream(noise.rows(), noise.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      if (raw(i, j) > model.lambda_min) {
        const double rate = raw(i, j);
        const double g = 1.0 + (counts(i, j) - rate) / (2.0 * rate);
        const double clipped =
            std::min(std::max(g, model.surrogate_clip_lo), model.surrogate_clip_hi);
        if (stats) {
          ++stats->total;
          if (clipped != g) ++stats->clipped;
        }
        upstream(i, j) = disc_input_grad(i, j) * clipped;
      } else {
        // Clamped coordinate: the simulator is flat in the generator output.
        upstream(i, j) = 0.0;
        if (stats) ++stats->total;
      }
    }
  }
  return backward_params(model.generator, trace, upstream);
}

CountMatrix sample(const DSWGANModel& model, int n_days, double scale, const RngStream& stream) {
  if (!(scale > 0.0)) throw std::domain_error("sample: scale must be > 0");
  if (n_days < 1) throw std::invalid_argument("sample: n_days must be >= 1");
  CountMatrix out;
  out.horizon = model.horizon;
  out.days.resize(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    RngStream day = stream.substream(static_cast<std::uint64_t>(d));
    const auto y = sample_uniform_vector(day, model.p());
    const Eigen::VectorXd raw =
        forward_value(model.generator, Eigen::Map<const Eigen::VectorXd>(y.data(), model.p()));
    CountVector row(static_cast<std::size_t>(model.p()));
    for (int j = 0; j < model.p(); ++j) {
      const double rate = std::max(scale * raw(j), model.lambda_min);
      row[static_cast<std::size_t>(j)] = sample_poisson(day, rate);
    }
    out.days[static_cast<std::size_t>(d)] = std::move(row);
  }
  return out;
}

namespace {

nlohmann::json mlp_json_obj(const MLPParams& p) { return nlohmann::json::parse(mlp_to_json(p)); }

MLPParams mlp_from_obj(const nlohmann::json& j) { return mlp_from_json(j.dump()); }

}  // namespace

void save_model(const std::string& path, const DSWGANModel& model) {
  model.validate();
  nlohmann::json j;
  j["format"] = "dswgan-model";
  j["version"] = 1;
  j["horizon"] = {{"t_end", model.horizon.t_end}, {"intervals", model.horizon.intervals}};
  j["generator"] = mlp_json_obj(model.generator);
  j["discriminator"] = mlp_json_obj(model.discriminator);
  nlohmann::json st;
  st["enabled"] = model.standardize.enabled;
  if (model.standardize.enabled) {
    st["mean"] = std::vector<double>(model.standardize.mean.data(),
                                     model.standardize.mean.data() + model.standardize.mean.size());
    st["std"] = std::vector<double>(
        model.standardize.stddev.data(),
        model.standardize.stddev.data() + model.standardize.stddev.size());
  }
  j["standardize"] = std::move(st);
  j["lambda_min"] = model.lambda_min;
  j["surrogate_clip"] = {model.surrogate_clip_lo, model.surrogate_clip_hi};
  j["meta"] = {{"seed", model.seed}, {"config_hash", model.config_hash}, {"tool_version", "0.1.0"}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

DSWGANModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": not a valid model file: " + e.what());
  }
  if (j.value("format", "") != std::string("dswgan-model"))
    throw std::runtime_error(path + ": not a dswgan model file");

  DSWGANModel m;
  m.horizon.t_end = j.at("horizon").at("t_end").get<double>();
  m.horizon.intervals = j.at("horizon").at("intervals").get<int>();
  m.generator = mlp_from_obj(j.at("generator"));
  m.discriminator = mlp_from_obj(j.at("discriminator"));
  const auto& st = j.at("standardize");
  m.standardize.enabled = st.at("enabled").get<bool>();
  if (m.standardize.enabled) {
    const auto mean = st.at("mean").get<std::vector<double>>();
    const auto sd = st.at("std").get<std::vector<double>>();
    m.standardize.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    m.standardize.stddev = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
  }
  m.lambda_min = j.at("lambda_min").get<double>();
  m.surrogate_clip_lo = j.at("surrogate_clip").at(0).get<double>();
  m.surrogate_clip_hi = j.at("surrogate_clip").at(1).get<double>();
  if (j.contains("meta")) {
    m.seed = j["meta"].value("seed", std::uint64_t{0});
    m.config_hash = j["meta"].value("config_hash", "");
  }
  m.validate();
  return m;
}

}  // namespace dswgan
