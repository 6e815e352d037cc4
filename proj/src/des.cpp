#include "tnm/des.hpp"

#include <algorithm>
#include <string>

#include "tnm/error.hpp"

namespace tnm::des {

Slot& Slot::operator=(Slot&& other) noexcept {
  if (this != &other) {
    if (held() && !resource_->sim_.tearing_down()) resource_->release_one();
    resource_ = std::exchange(other.resource_, nullptr);
  }
  return *this;
}

Slot::~Slot() {
  if (held() && !resource_->sim_.tearing_down()) resource_->release_one();
}

void Slot::release() {
  if (!held()) throw Error(Errc::protocol_violation, "release without a held resource slot");
  std::exchange(resource_, nullptr)->release_one();
}

Resource::Resource(Simulation& sim, int capacity) : sim_(sim), capacity_(capacity) {
  if (capacity < 1) throw Error(Errc::invalid_argument, "resource capacity must be at least 1");
}

bool Resource::try_grant() noexcept {
  if (in_use_ >= capacity_ || !waiters_.empty()) return false;
  ++in_use_;
  ++grants_;
  peak_ = std::max(peak_, in_use_);
  return true;
}

void Resource::release_one() {
  if (in_use_ == 0) throw Error(Errc::protocol_violation, "resource released more often than acquired");
  if (waiters_.empty()) {
    --in_use_;
    return;
  }
  Process::Handle next = waiters_.front();
  waiters_.pop_front();
  ++grants_;
  sim_.resume_at(sim_.now(), next);
}

Simulation::~Simulation() {
  tearing_down_ = true;
  for (void* address : live_) Process::Handle::from_address(address).destroy();
}

void Simulation::schedule(Time at, Process process) {
  if (at < now_) {
    throw Error(Errc::causality_violation,
                "cannot schedule at " + std::to_string(at) + " before now " + std::to_string(now_));
  }
  Process::Handle h = process.release();
  live_.insert(h.address());
  resume_at(at, h);
}

void Simulation::resume_at(Time at, Process::Handle h) { calendar_.push(Event{at, next_seq_++, h}); }

Simulation::Timeout Simulation::timeout(Time delay) {
  if (!(delay >= 0.0)) throw Error(Errc::causality_violation, "negative timeout " + std::to_string(delay));
  return Timeout{*this, now_ + delay};
}

Simulation::Timeout Simulation::wait_until(Time at) {
  if (at < now_) throw Error(Errc::causality_violation, "cannot wait until " + std::to_string(at));
  return Timeout{*this, at};
}

Resource& Simulation::add_resource(int capacity) { return resources_.emplace_back(*this, capacity); }

void Simulation::step(const Event& event) {
  now_ = event.time;
  ++events_processed_;
  Process::Handle h = event.handle;
  h.resume();
  if (h.done()) {
    std::exception_ptr error = h.promise().error;
    live_.erase(h.address());
    h.destroy();
    if (error) std::rethrow_exception(error);
  }
}

void Simulation::run_until(Time horizon) {
  if (horizon < now_) {
    throw Error(Errc::causality_violation,
                "horizon " + std::to_string(horizon) + " is before now " + std::to_string(now_));
  }
  while (!calendar_.empty() && calendar_.top().time <= horizon) {
    Event event = calendar_.top();
    calendar_.pop();
    step(event);
  }
  now_ = horizon;
}

void Simulation::run() {
  while (!calendar_.empty()) {
    Event event = calendar_.top();
    calendar_.pop();
    step(event);
  }
}

}  // namespace tnm::des
