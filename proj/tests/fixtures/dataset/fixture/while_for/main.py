count = 0
level = 3
while level > 0:
    for k in range(level):
        count += k
    level -= 1
print(count)
