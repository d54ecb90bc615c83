k = int(input())
total = 0
for i in range(k):
    total += i
print(total)
