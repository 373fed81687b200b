#include <cstdio>

int main() {
  std::fprintf(stderr, "stk: command line not wired up yet\n");
  return 2;
}
