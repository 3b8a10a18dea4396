int check(int i);
void fix(int i, int j);

int repair(int n, int m) {
  int i, j, bad = 0;
  #pragma preomp parallel for private(j)
  for (i = 0; i < n; i++) {
    if (check(i)) {
      bad++;
      for (j = 0; j < m; j++) {
        fix(i, j);
      }
    } else {
      continue;
    }
  }
  while (bad > 100) {
    bad = bad / 2;
  }
  return bad;
}
