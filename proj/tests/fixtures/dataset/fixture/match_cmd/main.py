def describe(cmd):
    match cmd:
        case "go":
            return "moving"
        case "stop":
            return "halted"
        case _:
            return "unknown"


print(describe("stop"))
