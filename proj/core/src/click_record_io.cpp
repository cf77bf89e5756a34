#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "photocorr/errors.hpp"
#include "photocorr/trajectories.hpp"

namespace photocorr {

void write_click_record(std::ostream& out, const ClickRecord& record) {
  fmt::print(out, "# seed={}\n# duration={:.12g}\n# n_traj={}\n", record.seed, record.duration,
             record.n_trajectories);
  for (const auto& c : record.clicks) {
    fmt::print(out, "{}\t{:.12g}\t{}\n", c.trajectory, c.time, channel_name(c.channel));
  }
}

ClickRecord read_click_record(std::istream& in) {
  ClickRecord record;
  bool have_seed = false, have_duration = false, have_ntraj = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "seed") {
          record.seed = std::stoull(value);
          have_seed = true;
        } else if (key == "duration") {
          record.duration = std::stod(value);
          have_duration = true;
        } else if (key == "n_traj") {
          record.n_trajectories = static_cast<std::uint32_t>(std::stoul(value));
          have_ntraj = true;
        }
      } catch (const std::exception&) {
        throw ArgumentError(fmt::format("click record line {}: bad header value '{}'", lineno, value));
      }
      continue;
    }
    std::istringstream row(line);
    std::uint64_t traj = 0;
    double time = 0.0;
    std::string channel;
    if (!(row >> traj >> time >> channel)) {
      throw ArgumentError(fmt::format("click record line {}: expected 'trajectory<TAB>time<TAB>channel'", lineno));
    }
    Channel ch;
    if (channel == "cavity") {
      ch = Channel::cavity;
    } else if (channel == "qubit") {
      ch = Channel::qubit;
    } else {
      throw ArgumentError(fmt::format("click record line {}: unknown channel '{}'", lineno, channel));
    }
    record.clicks.push_back({static_cast<std::uint32_t>(traj), time, ch});
  }
  if (!have_seed || !have_duration || !have_ntraj) {
    throw ArgumentError("click record: missing one of the '# seed=', '# duration=', '# n_traj=' headers");
  }
  // 12 significant digits can merge two very close clicks onto one printed time.
  record.validate(/*strict=*/false);
  return record;
}

}  // namespace photocorr
