#include "gpeio/sim/truth.hpp"

#include <cmath>

#include "gpeio/liegroup/so3.hpp"

namespace gpeio {

Mat3 euler_to_rotation(const Vec3& ypr) {
  return (Eigen::AngleAxisd(ypr(0), Vec3::UnitZ()) * Eigen::AngleAxisd(ypr(1), Vec3::UnitY()) *
          Eigen::AngleAxisd(ypr(2), Vec3::UnitX()))
      .toRotationMatrix();
}

void euler_body_rate(const Vec3& ypr, const Vec3& d, const Vec3& dd, Vec3* omega, Vec3* domega) {
  const double b = ypr(1), a = ypr(2);  // pitch, roll
  const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
  const double dc = d(0), db = d(1), da = d(2);
  const double ddc = dd(0), ddb = dd(1), dda = dd(2);
  *omega = Vec3(da - dc * sb, db * ca + dc * sa * cb, -db * sa + dc * ca * cb);
  *domega = Vec3(dda - ddc * sb - dc * db * cb,
                 ddb * ca - db * da * sa + ddc * sa * cb + dc * da * ca * cb - dc * db * sa * sb,
                 -ddb * sa - db * da * ca + ddc * ca * cb - dc * da * sa * cb - dc * db * ca * sb);
}

namespace {

// Shared assembly from world position derivatives and Euler angle derivatives.
TruthState assemble(double t, const Vec3& r, const Vec3& dr, const Vec3& ddr, const Vec3& ypr, const Vec3& dypr,
                    const Vec3& ddypr) {
  TruthState s;
  s.t = t;
  const Mat3 C = euler_to_rotation(ypr);
  Vec3 w, dw;
  euler_body_rate(ypr, dypr, ddypr, &w, &dw);
  const Vec3 nu = C.transpose() * dr;
  const Vec3 dnu = -w.cross(nu) + C.transpose() * ddr;
  s.x.T = Pose(Rotation::from_approximate(C), r);
  s.x.w << w, nu;
  s.x.dw << dw, dnu;
  s.accel_world = ddr;
  return s;
}

class ConstantTwistTruth : public TruthModel {
 public:
  explicit ConstantTwistTruth(const Twist& w) : w_(w) {}
  TruthState at(double t) const override {
    TruthState s;
    s.t = t;
    s.x.T = Pose::exp(t * w_);
    s.x.w = w_;
    s.x.dw.setZero();
    // nu constant in the body frame, so r'' = C (omega x nu).
    s.accel_world = s.x.T.C() * w_.head<3>().cross(w_.tail<3>());
    return s;
  }

 private:
  Twist w_;
};

// a + b t + A sin(f t + p) per component.
struct Sines {
  Vec3 base, slope, amp, freq, phase;
  void eval(double t, Vec3* x, Vec3* dx, Vec3* ddx) const {
    for (int i = 0; i < 3; ++i) {
      const double s = std::sin(freq(i) * t + phase(i)), c = std::cos(freq(i) * t + phase(i));
      (*x)(i) = base(i) + slope(i) * t + amp(i) * s;
      (*dx)(i) = slope(i) + amp(i) * freq(i) * c;
      (*ddx)(i) = -amp(i) * freq(i) * freq(i) * s;
    }
  }
};

class SinusoidalTruth : public TruthModel {
 public:
  explicit SinusoidalTruth(const SinusoidalMotion& m)
      : pos_{m.position0, m.velocity, m.position_amplitude, m.position_frequency, m.position_phase},
        ang_{m.angles0, Vec3::Zero(), m.angle_amplitude, m.angle_frequency, m.angle_phase} {}
  TruthState at(double t) const override {
    Vec3 r, dr, ddr, a, da, dda;
    pos_.eval(t, &r, &dr, &ddr);
    ang_.eval(t, &a, &da, &dda);
    return assemble(t, r, dr, ddr, a, da, dda);
  }

 private:
  Sines pos_, ang_;
};

class FigureEightTruth : public TruthModel {
 public:
  FigureEightTruth(double period, const Vec3& amp, const Vec3& angles) : w_(2.0 * M_PI / period), amp_(amp), ang_(angles) {}
  TruthState at(double t) const override {
    // y = A sin(wt), z = B sin(2wt): a figure eight in the y-z plane, with a
    // small fore-aft oscillation.
    const double w = w_, s1 = std::sin(w * t), c1 = std::cos(w * t);
    const double s2 = std::sin(2 * w * t + 0.5), c2 = std::cos(2 * w * t + 0.5);
    const double s2z = std::sin(2 * w * t), c2z = std::cos(2 * w * t);
    const Vec3 r(amp_(0) * s2, amp_(1) * s1, amp_(2) * s2z);
    const Vec3 dr(2 * w * amp_(0) * c2, w * amp_(1) * c1, 2 * w * amp_(2) * c2z);
    const Vec3 ddr(-4 * w * w * amp_(0) * s2, -w * w * amp_(1) * s1, -4 * w * w * amp_(2) * s2z);
    const double s3 = std::sin(w * t + 1.0), c3 = std::cos(w * t + 1.0);
    const double s4 = std::sin(2 * w * t), c4 = std::cos(2 * w * t);
    const Vec3 a(ang_(0) * s1, ang_(1) * s4, ang_(2) * s3);
    const Vec3 da(w * ang_(0) * c1, 2 * w * ang_(1) * c4, w * ang_(2) * c3);
    const Vec3 dda(-w * w * ang_(0) * s1, -4 * w * w * ang_(1) * s4, -w * w * ang_(2) * s3);
    return assemble(t, r, dr, ddr, a, da, dda);
  }

 private:
  double w_;
  Vec3 amp_, ang_;
};

}  // namespace

std::unique_ptr<TruthModel> make_truth(const ScenarioSpec& spec) {
  switch (spec.family) {
    case TrajectoryFamily::kConstantTwist: return std::make_unique<ConstantTwistTruth>(spec.twist);
    case TrajectoryFamily::kSinusoidal: return std::make_unique<SinusoidalTruth>(spec.sinusoid);
    case TrajectoryFamily::kFigureEight:
      return std::make_unique<FigureEightTruth>(spec.figure_eight_period, spec.figure_eight_amplitude,
                                                spec.figure_eight_angles);
  }
  return nullptr;
}

std::vector<TruthState> gen_truth(const ScenarioSpec& spec, double rate) {
  const auto truth = make_truth(spec);
  const long n = std::lround(spec.duration * rate);
  std::vector<TruthState> out;
  out.reserve(n + 1);
  for (long i = 0; i <= n; ++i) out.push_back(truth->at(i / rate));
  return out;
}

}  // namespace gpeio
