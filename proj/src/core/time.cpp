#include "bdl/core/time.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <thread>

namespace bdl {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  auto first = text.data() + pos;
  auto last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || *first == '-' || *first == '+') {
    throw ValidationError("bad timestamp digits in '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  auto day = floor<days>(ts);
  year_month_day ymd{day};
  hh_mm_ss<seconds> tod{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02d%02d%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  // YYYYMMDDTHHMMSSZ
  if (text.size() != 16 || text[8] != 'T' || text[15] != 'Z') {
    throw ValidationError("timestamp '" + std::string(text) + "' is not ISO-8601 basic UTC");
  }
  int y = parse_digits(text, 0, 4);
  int mo = parse_digits(text, 4, 2);
  int d = parse_digits(text, 6, 2);
  int h = parse_digits(text, 9, 2);
  int mi = parse_digits(text, 11, 2);
  int s = parse_digits(text, 13, 2);
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw ValidationError("timestamp '" + std::string(text) + "' is out of range");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

Timestamp SystemClock::now() const {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

bool SystemClock::sleep_until(Timestamp deadline, std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

bool ManualClock::sleep_until(Timestamp deadline, std::stop_token stop) {
  if (stop.stop_requested()) return false;
  if (deadline > now_) now_ = deadline;
  return true;
}

}  // namespace bdl
