#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
	TempDir() {
		std::string tmpl = (std::filesystem::temp_directory_path() / "auvsim_test_XXXXXX").string();
		path_ = mkdtemp(tmpl.data());
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir&) = delete;
	TempDir& operator=(const TempDir&) = delete;

	const std::string& path() const { return path_; }
	std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
	std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	out << content;
}

inline std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

struct CliResult {
	int exit_code = -1;
	std::string out;
};

// Run a shell command, capture stdout; stderr is kept out of the capture.
inline CliResult run_command(const std::string& cmd) {
	CliResult r;
	FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
	if (!pipe) return r;
	char buf[4096];
	size_t n;
	while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
	const int status = pclose(pipe);
	r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
	return r;
}

}  // namespace testutil
