public class Report {
    public String join(String[] parts) {
        return String.join(",", parts);
    }
}
