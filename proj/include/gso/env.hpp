#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "gso/grid.hpp"
#include "gso/trace.hpp"

namespace gso {

// Episodic simulation contract: discrete sampling every dt, per-step stage
// reward and constraint values, mid-episode policy switch support.
class Env {
  public:
    virtual ~Env() = default;

    virtual int state_dim() const = 0;
    virtual int num_constraints() const = 0;
    virtual int horizon() const = 0;
    virtual double dt() const = 0;
    virtual const Eigen::VectorXd& x0() const = 0;
    virtual double jump_bound() const = 0;
    virtual bool stochastic() const = 0;

    virtual double stage_reward(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd gbar(const Eigen::VectorXd& x) const = 0;

    // One transition of length dt from x under parameter coordinates a; k is
    // the step index within the episode (always 0 at an episode or restart
    // boundary), for plants whose controller runs slower than the sampler.
    virtual Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& a, int k,
                                 std::mt19937_64& rng) const = 0;
};

struct MonitorDecision {
    bool trigger = false;
    int backup_param = -1;
};

using Monitor = std::function<MonitorDecision(const Eigen::VectorXd& x)>;

// Simulates horizon() steps from x0 (optionally from a caller-supplied start
// state). The monitor, when given, runs once per sampled state before the
// next transition; the first Trigger switches the remainder of the episode to
// the backup parameter. Non-finite states raise a runtime error.
RolloutTrace rollout(const Env& env, int a_index, const ParamGrid& grid, const Monitor* monitor,
                     std::mt19937_64& rng, const Eigen::VectorXd* start_state = nullptr);

// y0 = sum of stage rewards, y_i = min over states of gbar_i, plus Gaussian
// observation noise of the given standard deviations (index 0 = objective).
Eigen::VectorXd episode_measurements(const RolloutTrace& trace, const Eigen::VectorXd& noise_std,
                                     std::mt19937_64& rng);

struct Toy1dOptions {
    int horizon = 100;
    bool process_noise = true;
    double noise_std = 1e-2;  // std of both the dynamics and sensor noise
    uint64_t seed = 0;        // seeds the construction-time jump-bound probing
};

std::unique_ptr<Env> toy1d_make(const Toy1dOptions& opts = {});
std::unique_ptr<Env> toy1d_make(uint64_t seed);

// Default 56-point discretization of the toy parameter interval [-6, 5].
ParamGrid toy1d_default_grid();

struct LinearPlantOptions {
    int dim = 4;                    // exposed state dimension; dim/2 chained masses
    int horizon = 240;
    double dt = 0.05;               // sampling interval of the safety monitor
    int control_period = 2;         // env steps between controller updates
    double zeta = 1.0;              // constraint radius around the target
    double kp_center = 60.0;        // position gain at the dial midpoint
    double kp_edge = 4.5;           // position gain at the dial extremes
    double kd_peak = 5.0;           // velocity gain at the dial midpoint
    double neg_stiffness = 1.0;     // destabilizing spring on the driven mass
    double anti_damping = 0.2;      // negative damping on the driven mass
    double coupling = 0.5;          // spring between neighboring masses
    double anchor_stiffness = 2.0;  // grounding spring on the last mass
    double anchor_damping = 0.05;   // damper on every passive mass
    double load = 0.6;              // constant force pushing the driven mass off target
    double u_max = 4.0;             // actuator saturation
    double x0_pos = 0.3;            // initial offset of every mass position
    double sense_cap = 3.0;         // instrument range of the state-norm sensor
    bool process_noise = true;
    double noise_std = 0.08;        // velocity kick intensity, per sqrt(dt)
    uint64_t seed = 0;
};

std::unique_ptr<Env> linear_plant_make(const LinearPlantOptions& opts);
std::unique_ptr<Env> linear_plant_make(int dim, uint64_t seed);

ParamGrid linear_plant_default_grid();

// Noise-free ground truth per grid point: column 0 the expected episode
// objective, columns 1..q the expected episode constraint minima. Stochastic
// envs keep their process noise and average over `repeats` episodes with a
// fixed per-point RNG substream, so the table is deterministic.
Eigen::MatrixXd oracle_truth(const Env& env, const ParamGrid& grid, int repeats,
                             uint64_t seed = 20240901ULL);

}  // namespace gso
