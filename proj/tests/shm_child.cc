// Copyright 2026 The patfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test child for the shared-memory bitmap channel: bumps counter b for every
// byte b read from stdin, then exits with the first byte as status when the
// input starts with "X".

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>

int main() {
  const char *name = std::getenv("PATFUZZ_SHM_ID");
  if (name == nullptr) return 3;
  const int fd = shm_open(name, O_RDWR, 0);
  if (fd < 0) return 4;
  struct stat st;
  if (fstat(fd, &st) != 0) return 5;
  auto *map = static_cast<unsigned char *>(
      mmap(nullptr, st.st_size, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0));
  if (map == MAP_FAILED) return 6;
  unsigned char buf[256];
  ssize_t n;
  bool first = true, crash = false;
  while ((n = read(0, buf, sizeof(buf))) > 0) {
    for (ssize_t i = 0; i < n; ++i) {
      if (first && buf[i] == 'X') crash = true;
      first = false;
      unsigned char &c = map[buf[i] % st.st_size];
      if (c != 255) ++c;
    }
  }
  if (crash) abort();
  return 0;
}
