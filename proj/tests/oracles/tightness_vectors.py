"""Searches integer vectors (scaled by 1/1024, so exact in float32) whose
pairwise cosines are exactly 0.9, 0.8 and 0.7 and whose norms are within
2e-6 of 1."""
import itertools, math, random
N = 1048580
a = [1024, 2]
def four_squares(n):
    r = int(math.isqrt(n))
    for x in range(r, -1, -1):
        m = n - x*x
        for y in range(int(math.isqrt(m)), -1, -1):
            m2 = m - y*y
            for z in range(int(math.isqrt(m2)), -1, -1):
                w2 = m2 - z*z
                w = math.isqrt(w2)
                if w*w == w2: return [x, y, z, w]
random.seed(1)
target = -52429
for _ in range(200000):
    b = [921, 309] + [random.randint(-330, 330) for _ in range(2)]
    rem = N - sum(x*x for x in b)
    if rem < 0: continue
    tail = four_squares(rem)
    b = b + tail
    # c shares dims 2..3 with b; choose c2,c3 so b2c2+b3c3 = target
    for c2 in range(-700, 701):
        if b[3] == 0: break
        r = target - b[2]*c2
        if r % b[3]: continue
        c3 = r // b[3]
        c = [819, 104, c2, c3]
        rem_c = N - sum(x*x for x in c)
        if rem_c < 0: continue
        c = c + [0,0,0,0] + four_squares(rem_c)
        bb = b + [0]*4
        aa = a + [0]*(len(c)-2)
        dot = lambda u, v: sum(x*y for x, y in zip(u, v))
        assert dot(aa,aa)==dot(bb,bb)==dot(c,c)==N
        print(aa, bb, c, dot(aa,bb)/N, dot(aa,c)/N, dot(bb,c)/N, math.sqrt(N)/1024)
        raise SystemExit
