#pragma once

#include <coroutine>
#include <cstdint>
#include <deque>
#include <exception>
#include <optional>
#include <queue>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tnm::des {

// Unit-less simulation time. The scenario layer reads it as seconds.
using Time = double;

class Simulation;

// A simulation process: a coroutine that suspends on timeouts, resource
// acquisitions and mailbox reads. Created suspended; the simulation owns it
// once scheduled.
class Process {
 public:
  struct promise_type {
    std::exception_ptr error;

    Process get_return_object() { return Process(Handle::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() noexcept {}
    void unhandled_exception() noexcept { error = std::current_exception(); }
  };
  using Handle = std::coroutine_handle<promise_type>;

  Process(Process&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Process& operator=(Process&&) = delete;
  Process(const Process&) = delete;
  ~Process() {
    if (handle_) handle_.destroy();
  }

 private:
  friend class Simulation;
  explicit Process(Handle h) : handle_(h) {}
  Handle release() { return std::exchange(handle_, {}); }

  Handle handle_;
};

class Resource;

// Move-only token for one granted resource slot. Releases on destruction if
// still held.
class Slot {
 public:
  Slot() = default;
  explicit Slot(Resource& resource) : resource_(&resource) {}
  Slot(Slot&& other) noexcept : resource_(std::exchange(other.resource_, nullptr)) {}
  Slot& operator=(Slot&& other) noexcept;
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;
  ~Slot();

  bool held() const noexcept { return resource_ != nullptr; }
  // Throws protocol-violation when no slot is held.
  void release();

 private:
  Resource* resource_ = nullptr;
};

// Capacity-limited resource with strictly FIFO grants. A release hands the
// slot to the head waiter at the same instant.
class Resource {
 public:
  Resource(Simulation& sim, int capacity);
  Resource(const Resource&) = delete;
  Resource& operator=(const Resource&) = delete;

  int capacity() const noexcept { return capacity_; }
  int in_use() const noexcept { return in_use_; }
  std::size_t queue_length() const noexcept { return waiters_.size(); }
  int peak_in_use() const noexcept { return peak_; }
  std::uint64_t grants() const noexcept { return grants_; }

  struct Acquire {
    Resource& resource;

    bool await_ready() noexcept { return resource.try_grant(); }
    void await_suspend(Process::Handle h) { resource.waiters_.push_back(h); }
    Slot await_resume() noexcept { return Slot(resource); }
  };
  // co_await resource.acquire() yields a Slot.
  Acquire acquire() { return Acquire{*this}; }

 private:
  friend class Slot;
  bool try_grant() noexcept;
  void release_one();

  Simulation& sim_;
  int capacity_;
  int in_use_ = 0;
  int peak_ = 0;
  std::uint64_t grants_ = 0;
  std::deque<Process::Handle> waiters_;
};

class Simulation {
 public:
  Simulation() = default;
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
  ~Simulation();

  Time now() const noexcept { return now_; }

  // Starts `process` at `at`, after everything already scheduled for that
  // instant. Throws causality-violation if at < now.
  void schedule(Time at, Process process);
  void spawn(Process process) { schedule(now_, std::move(process)); }

  // Processes every event with time <= horizon, then sets now = horizon.
  void run_until(Time horizon);
  // Processes events until the calendar is empty.
  void run();

  struct Timeout {
    Simulation& sim;
    Time at;

    bool await_ready() const noexcept { return false; }
    void await_suspend(Process::Handle h) { sim.resume_at(at, h); }
    void await_resume() const noexcept {}
  };
  Timeout timeout(Time delay);
  Timeout wait_until(Time at);

  // Resources live as long as the simulation.
  Resource& add_resource(int capacity);

  std::uint64_t events_processed() const noexcept { return events_processed_; }
  std::size_t live_processes() const noexcept { return live_.size(); }
  std::size_t pending_events() const noexcept { return calendar_.size(); }
  bool tearing_down() const noexcept { return tearing_down_; }

 private:
  friend class Resource;
  template <class T>
  friend class Mailbox;

  struct Event {
    Time time;
    std::uint64_t seq;
    Process::Handle handle;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void resume_at(Time at, Process::Handle h);
  void step(const Event& event);

  Time now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t events_processed_ = 0;
  bool tearing_down_ = false;
  std::deque<Resource> resources_;
  std::priority_queue<Event, std::vector<Event>, Later> calendar_;
  std::unordered_set<void*> live_;
};

// FIFO message queue between processes. get() suspends until an item is
// available; items go to waiters in arrival order.
template <class T>
class Mailbox {
 public:
  explicit Mailbox(Simulation& sim) : sim_(sim) {}
  Mailbox(const Mailbox&) = delete;
  Mailbox& operator=(const Mailbox&) = delete;

  void put(T item) {
    if (!waiters_.empty()) {
      Waiter w = waiters_.front();
      waiters_.pop_front();
      w.slot->emplace(std::move(item));
      sim_.resume_at(sim_.now(), w.handle);
      return;
    }
    items_.push_back(std::move(item));
  }

  std::size_t size() const noexcept { return items_.size(); }

  struct Get {
    Mailbox& box;
    std::optional<T> value;

    bool await_ready() const noexcept { return !box.items_.empty(); }
    void await_suspend(Process::Handle h) { box.waiters_.push_back({h, &value}); }
    T await_resume() {
      if (!value) {
        value.emplace(std::move(box.items_.front()));
        box.items_.pop_front();
      }
      return std::move(*value);
    }
  };
  Get get() { return Get{*this, std::nullopt}; }

 private:
  struct Waiter {
    Process::Handle handle;
    std::optional<T>* slot;
  };

  Simulation& sim_;
  std::deque<T> items_;
  std::deque<Waiter> waiters_;
};

}  // namespace tnm::des
