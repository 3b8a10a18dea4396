void cell(int a, int b, int c);

void grid(int A, int B, int C) {
  int a, b, c;
  #pragma preomp parallel for private(b, c)
  for (a = 0; a < A; a++) {
    #pragma preomp parallel for private(c)
    for (b = 0; b < B; b++) {
      #pragma preomp parallel for
      for (c = 0; c < C; c++) {
        cell(a, b, c);
      }
    }
  }
}
