#include "folio/rasterize.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <utility>

#include "folio/error.hpp"

extern char** environ;

namespace folio {

namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("folio-raster-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

// Runs argv with stdout/stderr redirected to `log`. Returns the exit status,
// or -1 when the process could not be started.
int run_process(const std::vector<std::string>& args, const fs::path& log) {
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) return -1;

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return -1;
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

std::string tail_of(const fs::path& log) {
  std::ifstream in(log);
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.size() > 400) text = text.substr(text.size() - 400);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

std::vector<PageImage> rasterize_volume(const fs::path& pdf, std::uint32_t dpi,
                                        const RendererConfig& renderer) {
  if (dpi < 72 || dpi > 600) {
    throw Error(ErrorCode::kValidation,
                "dpi " + std::to_string(dpi) + " outside [72, 600]");
  }
  if (renderer.command.empty()) {
    throw Error(ErrorCode::kIngestion, "no PDF renderer configured");
  }
  std::error_code ec;
  if (!fs::is_regular_file(pdf, ec)) {
    throw Error(ErrorCode::kIngestion, "cannot read " + pdf.string());
  }
  const std::string volume_id = pdf.stem().string();

  TempDir scratch;
  const fs::path log = scratch.path() / "renderer.log";
  std::vector<std::string> args = renderer.command;
  args.insert(args.end(), {"-r", std::to_string(dpi), "-png", pdf.string(),
                           (scratch.path() / "page").string()});
  const int status = run_process(args, log);
  if (status == -1) {
    throw Error(ErrorCode::kIngestion,
                "cannot start PDF renderer '" + renderer.command.front() + "'");
  }
  if (status != 0) {
    throw Error(ErrorCode::kIngestion,
                "renderer failed on " + pdf.string() + " (exit " +
                    std::to_string(status) + "): " + tail_of(log));
  }

  // Outputs are page-<n>.png with n possibly zero padded.
  std::vector<std::pair<unsigned long, fs::path>> outputs;
  for (const auto& entry : fs::directory_iterator(scratch.path())) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("page-") || entry.path().extension() != ".png") continue;
    const std::string digits = entry.path().stem().string().substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    outputs.emplace_back(std::stoul(digits), entry.path());
  }
  if (outputs.empty()) {
    throw Error(ErrorCode::kEmptyVolume, pdf.string() + " has no pages");
  }
  std::sort(outputs.begin(), outputs.end());

  std::vector<PageImage> images;
  images.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    PageImage image;
    image.page = {volume_id, static_cast<std::uint32_t>(i + 1)};
    image.dpi = dpi;
    image.png = read_file_bytes(outputs[i].second);
    try {
      inspect_png(image.png);
    } catch (const Error& e) {
      throw Error(ErrorCode::kIngestion,
                  "page " + to_string(image.page) + ": " + e.what());
    }
    images.push_back(std::move(image));
  }
  return images;
}

}  // namespace folio
