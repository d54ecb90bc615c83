def squares(n):
    out = []
    for i in range(1, n + 1):
        out.append(i * i)
    return out


print(squares(4))
